// ammlab: batch front end for the manipulation/reversion simulator.
// Subcommands: simulate, sweep, experiment, estimate. All outputs are CSV
// plus a manifest that is itself a re-runnable config file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ammlab/experiment.hpp"
#include "ammlab/panel_io.hpp"
#include "ammlab/sim.hpp"

namespace fs = std::filesystem;
using ammlab::format_number;

namespace {

constexpr const char* kVersion = "1.0.0";

// usage/config error -> exit 2 (runtime numerical failures use exit 3)
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ------------------------------ config files ------------------------------

using KeyValues = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    KeyValues kv;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_number) +
                             ": expected 'key = value'");
        kv[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
    return kv;
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': bad number '" + value + "'");
    }
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw UsageError("config key '" + key + "': bad integer '" + value + "'");
    }
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream stream(value);
    while (std::getline(stream, item, ','))
        out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw UsageError("config key '" + key + "': empty list");
    return out;
}

// Applies kv onto config; every key must be consumed (misspellings are hard
// errors, never silent defaults).
ammlab::SimConfig sim_config_from(const KeyValues& kv) {
    ammlab::SimConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "m") c.num_traders_index = static_cast<int>(to_int(key, value));
        else if (key == "wealth") c.initial_wealth = to_double(key, value);
        else if (key == "yes_reserve") c.initial_yes_reserve = to_double(key, value);
        else if (key == "no_reserve") c.initial_no_reserve = to_double(key, value);
        else if (key == "maniswap_exponent") c.maniswap_exponent = to_double(key, value);
        else if (key == "lambda") c.learning_rate = to_double(key, value);
        else if (key == "alpha") c.agreement = to_double(key, value);
        else if (key == "warmup") c.warmup_periods = static_cast<int>(to_int(key, value));
        else if (key == "post") c.post_periods = static_cast<int>(to_int(key, value));
        else if (key == "shock") c.shock_size = to_double(key, value);
        else if (key == "reps") c.replications = static_cast<int>(to_int(key, value));
        else if (key == "seed") c.base_seed = static_cast<std::uint64_t>(to_int(key, value));
        else throw UsageError("unknown config key: " + key);
    }
    return c;
}

ammlab::ExperimentConfig experiment_config_from(const KeyValues& kv,
                                                std::uint64_t& seed) {
    ammlab::ExperimentConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "markets") c.num_markets = static_cast<int>(to_int(key, value));
        else if (key == "yes_prob") c.yes_probability = to_double(key, value);
        else if (key == "no_prob") c.no_probability = to_double(key, value);
        else if (key == "control_prob") c.control_probability = to_double(key, value);
        else if (key == "shock") c.shock_magnitude = to_double(key, value);
        else if (key == "horizon") c.horizon = static_cast<int>(to_int(key, value));
        else if (key == "warmup") c.warmup_periods = static_cast<int>(to_int(key, value));
        else if (key == "wealth") c.initial_wealth = to_double(key, value);
        else if (key == "reserve_grid") c.reserve_choices = to_list(key, value);
        else if (key == "lambda_grid") c.lambda_choices = to_list(key, value);
        else if (key == "alpha_grid") c.alpha_choices = to_list(key, value);
        else if (key == "m_grid") {
            c.m_choices.clear();
            for (const double v : to_list(key, value))
                c.m_choices.push_back(static_cast<int>(v));
        } else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(key, value));
        else throw UsageError("unknown config key: " + key);
    }
    return c;
}

// ------------------------------- outputs ----------------------------------

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const KeyValues& config_snapshot,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::string>& extra_comments = {}) {
    auto out = open_output(dir, "manifest.txt");
    out << "# ammlab " << kVersion << " manifest\n";
    out << "# command: " << command << '\n';
    for (const auto& comment : extra_comments) out << "# " << comment << '\n';
    for (const auto& file : outputs) out << "# output: " << file << '\n';
    out << "# re-run: ammlab " << command << " --config manifest.txt --out <dir>\n";
    for (const auto& [key, value] : config_snapshot) out << key << " = " << value << '\n';
}

KeyValues snapshot(const ammlab::SimConfig& c) {
    return {
        {"m", std::to_string(c.num_traders_index)},
        {"wealth", format_number(c.initial_wealth)},
        {"yes_reserve", format_number(c.initial_yes_reserve)},
        {"no_reserve", format_number(c.initial_no_reserve)},
        {"maniswap_exponent", format_number(c.maniswap_exponent)},
        {"lambda", format_number(c.learning_rate)},
        {"alpha", format_number(c.agreement)},
        {"warmup", std::to_string(c.warmup_periods)},
        {"post", std::to_string(c.post_periods)},
        {"shock", format_number(c.shock_size)},
        {"reps", std::to_string(c.replications)},
        {"seed", std::to_string(c.base_seed)},
    };
}

std::string join_list(const std::vector<double>& values) {
    std::string out;
    for (const double v : values) {
        if (!out.empty()) out += ',';
        out += format_number(v);
    }
    return out;
}

KeyValues snapshot(const ammlab::ExperimentConfig& c, std::uint64_t seed) {
    std::vector<double> ms(c.m_choices.begin(), c.m_choices.end());
    return {
        {"markets", std::to_string(c.num_markets)},
        {"yes_prob", format_number(c.yes_probability)},
        {"no_prob", format_number(c.no_probability)},
        {"control_prob", format_number(c.control_probability)},
        {"shock", format_number(c.shock_magnitude)},
        {"horizon", std::to_string(c.horizon)},
        {"warmup", std::to_string(c.warmup_periods)},
        {"wealth", format_number(c.initial_wealth)},
        {"reserve_grid", join_list(c.reserve_choices)},
        {"m_grid", join_list(ms)},
        {"lambda_grid", join_list(c.lambda_choices)},
        {"alpha_grid", join_list(c.alpha_choices)},
        {"seed", std::to_string(seed)},
    };
}

// ------------------------------- commands ---------------------------------

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<long long> seed;
    std::optional<int> reps;
};

ammlab::SimConfig load_sim_config(const CommonOpts& opts) {
    KeyValues kv;
    if (!opts.config_path.empty()) kv = parse_config_file(opts.config_path);
    ammlab::SimConfig config = sim_config_from(kv);
    if (opts.seed) config.base_seed = static_cast<std::uint64_t>(*opts.seed);
    if (opts.reps) config.replications = *opts.reps;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return config;
}

void cmd_simulate(const CommonOpts& opts) {
    const ammlab::SimConfig config = load_sim_config(opts);
    const ammlab::AveragedPath path = ammlab::run_monte_carlo(config);
    const ammlab::Reversion rev = config.shock_size != 0.0
                                      ? ammlab::reversion_coefficients(path, config.shock_size)
                                      : ammlab::Reversion{};

    auto path_csv = open_output(opts.out_dir, "path.csv");
    path_csv << "period,mean_price,std_error,n_reps\n";
    for (std::size_t i = 0; i < path.mean_prices.size(); ++i) {
        const long long relative =
            static_cast<long long>(i) - static_cast<long long>(path.shock_index);
        path_csv << relative << ',' << format_number(path.mean_prices[i]) << ','
                 << format_number(path.standard_errors[i]) << ',' << path.replications
                 << '\n';
    }

    auto summary = open_output(opts.out_dir, "summary.csv");
    summary << "key,value\n";
    for (const auto& [key, value] : snapshot(config)) summary << key << ',' << value << '\n';
    if (config.shock_size != 0.0) {
        summary << "sr_reversion," << format_number(rev.short_run) << '\n';
        summary << "lr_reversion," << format_number(rev.long_run) << '\n';
    }

    write_manifest(opts.out_dir, "simulate", snapshot(config),
                   {"path.csv", "summary.csv"});
}

void cmd_sweep(const CommonOpts& opts, const std::string& axis_name,
               const std::string& values_csv) {
    const ammlab::SimConfig config = load_sim_config(opts);
    ammlab::SweepAxis axis;
    if (axis_name == "lambda") axis = ammlab::SweepAxis::LearningRate;
    else if (axis_name == "alpha") axis = ammlab::SweepAxis::Agreement;
    else if (axis_name == "m") axis = ammlab::SweepAxis::NumTraders;
    else throw UsageError("--axis must be lambda, alpha or m");
    if (trim(values_csv).empty()) throw UsageError("--values must be non-empty");
    const std::vector<double> values = to_list("--values", values_csv);

    std::vector<ammlab::SweepRow> rows;
    try {
        rows = ammlab::sweep(config, axis, values);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    auto table = open_output(opts.out_dir, "table_a1.csv");
    table << "axis,value,sr_reversion,lr_reversion\n";
    for (const auto& row : rows)
        table << axis_name << ',' << format_number(row.value) << ','
              << format_number(row.reversion.short_run) << ','
              << format_number(row.reversion.long_run) << '\n';

    write_manifest(opts.out_dir, "sweep --axis " + axis_name + " --values " + values_csv,
                   snapshot(config), {"table_a1.csv"});
}

void cmd_experiment(const CommonOpts& opts) {
    KeyValues kv;
    if (!opts.config_path.empty()) kv = parse_config_file(opts.config_path);
    std::uint64_t seed = 0;
    ammlab::ExperimentConfig config = experiment_config_from(kv, seed);
    if (opts.seed) seed = static_cast<std::uint64_t>(*opts.seed);
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const auto panel = ammlab::generate_panel(config, seed);
    auto out = open_output(opts.out_dir, "panel.csv");
    ammlab::write_panel_csv(out, panel);
    write_manifest(opts.out_dir, "experiment", snapshot(config, seed), {"panel.csv"});
}

void append_estimate_rows(std::ostream& out, const ammlab::EstimateReport& report,
                          const std::string& split_point) {
    const double dof = report.n_obs - static_cast<int>(report.coefficients.size());
    const boost::math::students_t dist(dof);
    for (Eigen::Index i = 0; i < report.coefficients.size(); ++i) {
        const double estimate = report.coefficients(i);
        const double se = std::sqrt(report.robust_covariance(i, i));
        double t_stat = 0.0, p_value = 1.0;
        if (se > 0.0) {
            t_stat = estimate / se;
            p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t_stat)));
        } else if (estimate != 0.0) {
            p_value = 0.0;
        }
        out << report.coefficient_names[i] << ',' << format_number(estimate) << ','
            << format_number(se) << ',' << format_number(t_stat) << ','
            << format_number(p_value) << ',' << split_point << '\n';
    }
    for (const auto& test : report.tests)
        out << test.name << ',' << format_number(test.statistic) << ",,"
            << format_number(test.statistic) << ',' << format_number(test.p_value) << ','
            << split_point << '\n';
}

void cmd_estimate(const std::string& panel_path, int horizon, const std::string& test,
                  const std::string& split, const std::string& out_dir) {
    if (!test.empty() && test != "symmetry")
        throw UsageError("--test supports only 'symmetry'");
    const auto panel = ammlab::read_panel_csv_file(panel_path);

    auto out = open_output(out_dir, "estimates.csv");
    out << "coefficient,estimate,robust_se,t_stat,p_value,split_point\n";

    ammlab::EstimateReport report = ammlab::estimate_treatment_effect(panel, horizon);
    if (test == "symmetry") report.tests.push_back(ammlab::symmetry_test(report));
    append_estimate_rows(out, report, "");
    for (const int id : report.excluded_markets)
        std::cerr << "note: market " << id << " lacks period " << horizon
                  << " and was excluded\n";

    if (!split.empty()) {
        const ammlab::SplitReport split_report =
            ammlab::heterogeneity_split(panel, split, horizon);
        append_estimate_rows(out, split_report.report,
                             format_number(split_report.split_point));
    }

    KeyValues meta = {{"panel", panel_path}, {"horizon", std::to_string(horizon)}};
    if (!test.empty()) meta["test"] = test;
    if (!split.empty()) meta["split"] = split;
    write_manifest(out_dir, "estimate", {}, {"estimates.csv"},
                   {"panel: " + panel_path, "horizon: " + std::to_string(horizon)});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMM prediction-market manipulation simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    std::string axis, values, panel_path, test, split;
    int horizon = 0;

    auto add_common = [&](CLI::App* cmd, bool with_reps) {
        cmd->add_option("--config", opts.config_path, "key = value config file");
        cmd->add_option("--seed", opts.seed, "base RNG seed (overrides config)");
        if (with_reps) cmd->add_option("--reps", opts.reps, "replications (overrides config)");
        cmd->add_option("--out", opts.out_dir, "output directory")->required();
    };

    auto* simulate = app.add_subcommand("simulate", "averaged shock/reversion path");
    add_common(simulate, true);

    auto* sweep = app.add_subcommand("sweep", "reversion table over a parameter axis");
    add_common(sweep, true);
    sweep->add_option("--axis", axis, "lambda | alpha | m")->required();
    sweep->add_option("--values", values, "comma-separated axis values")->required();

    auto* experiment = app.add_subcommand("experiment", "synthetic randomized experiment panel");
    add_common(experiment, false);

    auto* estimate = app.add_subcommand("estimate", "treatment-effect estimates from a panel");
    estimate->add_option("--panel", panel_path, "panel.csv path")->required();
    estimate->add_option("--horizon", horizon, "post-shock period to estimate at")->required();
    estimate->add_option("--test", test, "additional test (symmetry)");
    estimate->add_option("--split", split, "moderator for the heterogeneity split");
    estimate->add_option("--out", opts.out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) cmd_simulate(opts);
        else if (sweep->parsed()) cmd_sweep(opts, axis, values);
        else if (experiment->parsed()) cmd_experiment(opts);
        else cmd_estimate(panel_path, horizon, test, split, opts.out_dir);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
