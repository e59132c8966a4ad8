#include "ammlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ammlab/rng.hpp"

namespace ammlab {

std::string to_string(Arm arm) {
    switch (arm) {
        case Arm::Yes: return "YES";
        case Arm::No: return "NO";
        case Arm::Control: return "CONTROL";
    }
    return "CONTROL";
}

Arm arm_from_string(const std::string& text) {
    if (text == "YES") return Arm::Yes;
    if (text == "NO") return Arm::No;
    if (text == "CONTROL") return Arm::Control;
    throw std::invalid_argument("unknown treatment arm: " + text);
}

void ExperimentConfig::validate() const {
    if (num_markets < 1)
        throw std::invalid_argument("ExperimentConfig: need at least one market");
    if (horizon < 0 || warmup_periods < 1)
        throw std::invalid_argument("ExperimentConfig: bad horizon or warmup");
    const double sum = yes_probability + no_probability + control_probability;
    if (yes_probability < 0.0 || no_probability < 0.0 || control_probability < 0.0 ||
        std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ExperimentConfig: arm probabilities must be a distribution");
    if (reserve_choices.empty() || m_choices.empty() || lambda_choices.empty() ||
        alpha_choices.empty())
        throw std::invalid_argument("ExperimentConfig: parameter grids must be non-empty");
}

std::vector<Arm> assign_treatment(int n_markets,
                                  const std::vector<double>& arm_probabilities,
                                  std::uint64_t seed) {
    if (arm_probabilities.empty())
        throw std::invalid_argument("assign_treatment: empty probability vector");
    double sum = 0.0;
    for (const double p : arm_probabilities) {
        if (p < 0.0) throw std::invalid_argument("assign_treatment: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("assign_treatment: probabilities must sum to 1");
    if (arm_probabilities.size() > 3)
        throw std::invalid_argument("assign_treatment: at most three arms");

    static constexpr Arm kArms[] = {Arm::Yes, Arm::No, Arm::Control};
    RngStream rng(seed, 0);
    std::vector<Arm> assignment(n_markets, Arm::Control);
    for (auto& arm : assignment) {
        const double u = rng.next_double();
        double acc = 0.0;
        for (std::size_t a = 0; a < arm_probabilities.size(); ++a) {
            acc += arm_probabilities[a];
            if (u < acc || a + 1 == arm_probabilities.size()) {
                arm = kArms[a];
                break;
            }
        }
    }
    return assignment;
}

std::vector<PanelRow> generate_panel(const ExperimentConfig& config,
                                     std::uint64_t seed) {
    config.validate();
    const auto assignment = assign_treatment(
        config.num_markets,
        {config.yes_probability, config.no_probability, config.control_probability},
        seed);

    std::vector<PanelRow> panel;
    panel.reserve(static_cast<std::size_t>(config.num_markets) * (config.horizon + 1));
    for (int market = 0; market < config.num_markets; ++market) {
        // Streams: odd indices draw market parameters, even indices drive the
        // replication itself, so the two never overlap.
        RngStream params(seed, 2 * static_cast<std::uint64_t>(market) + 1);
        SimConfig sim;
        sim.num_traders_index = config.m_choices[params.next_below(config.m_choices.size())];
        sim.learning_rate =
            config.lambda_choices[params.next_below(config.lambda_choices.size())];
        sim.agreement = config.alpha_choices[params.next_below(config.alpha_choices.size())];
        const double reserves =
            config.reserve_choices[params.next_below(config.reserve_choices.size())];
        sim.initial_yes_reserve = reserves;
        sim.initial_no_reserve = reserves;
        sim.initial_wealth = config.initial_wealth;
        sim.warmup_periods = config.warmup_periods;
        sim.post_periods = std::max(config.horizon, 1);
        sim.replications = 1;
        sim.base_seed = seed;
        switch (assignment[market]) {
            case Arm::Yes: sim.shock_size = config.shock_magnitude; break;
            case Arm::No: sim.shock_size = -config.shock_magnitude; break;
            case Arm::Control: sim.shock_size = 0.0; break;
        }

        const ReplicationOutcome outcome =
            run_replication_detail(sim, 2 * static_cast<std::uint64_t>(market) + 2);
        const std::size_t shock = outcome.path.shock_index;
        const double baseline = outcome.path.prices[shock - 1];
        const std::map<std::string, double> moderators = {
            {"num_traders", static_cast<double>(sim.num_traders_index)},
            {"learning_rate", sim.learning_rate},
            {"agreement", sim.agreement},
            {"volume", outcome.warmup_volume},
        };
        for (int period = 0; period <= config.horizon; ++period)
            panel.push_back({market, period, outcome.path.prices[shock + period],
                             assignment[market], baseline, moderators});
    }
    return panel;
}

namespace {

struct MarketObs {
    double price = 0.0;
    Arm treatment = Arm::Control;
    double baseline = 0.0;
    const std::map<std::string, double>* moderators = nullptr;
};

// One observation per market at the requested period; absent markets are
// collected rather than silently dropped.
std::map<int, MarketObs> cross_section(const std::vector<PanelRow>& panel, int period,
                                       std::vector<int>& excluded) {
    std::set<int> all_markets;
    std::map<int, MarketObs> obs;
    for (const auto& row : panel) {
        all_markets.insert(row.market_id);
        if (row.period == period)
            obs[row.market_id] = {row.price, row.treatment, row.baseline_price,
                                  &row.moderators};
    }
    for (const int id : all_markets)
        if (!obs.count(id)) excluded.push_back(id);
    if (obs.empty()) throw std::invalid_argument("panel has no rows at requested period");
    return obs;
}

bool has_control(const std::map<int, MarketObs>& obs) {
    return std::any_of(obs.begin(), obs.end(), [](const auto& kv) {
        return kv.second.treatment == Arm::Control;
    });
}

}  // namespace

EstimateReport estimate_treatment_effect(const std::vector<PanelRow>& panel,
                                         int period) {
    std::vector<int> excluded;
    const auto obs = cross_section(panel, period, excluded);
    const bool three_arm = has_control(obs);
    const int k = three_arm ? 4 : 3;

    Eigen::MatrixXd design(obs.size(), k);
    Eigen::VectorXd response(obs.size());
    Eigen::Index i = 0;
    for (const auto& [id, o] : obs) {
        design(i, 0) = 1.0;
        design(i, 1) = o.treatment == Arm::Yes ? 1.0 : 0.0;
        if (three_arm) design(i, 2) = o.treatment == Arm::Control ? 1.0 : 0.0;
        design(i, k - 1) = o.baseline;
        response(i) = o.price;
        ++i;
    }
    std::vector<std::string> names =
        three_arm ? std::vector<std::string>{"const", "yes", "control", "p_baseline"}
                  : std::vector<std::string>{"const", "yes", "p_baseline"};
    EstimateReport report = ols(design, response, std::move(names));
    report.excluded_markets = std::move(excluded);
    return report;
}

TestResult symmetry_test(const EstimateReport& report) {
    const int yes = report.index_of("yes");
    const int control = report.index_of("control");
    if (yes < 0 || control < 0)
        throw std::invalid_argument("symmetry_test: report lacks yes/control coefficients");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(report.coefficients.size());
    r(yes) = 1.0;
    r(control) = -2.0;
    return wald_restriction(report, r, "symmetry yes=2*control");
}

double median_split_point(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("median_split_point: empty input");
    const auto zeros = static_cast<std::size_t>(
        std::count(values.begin(), values.end(), 0.0));
    if (2 * zeros > values.size()) {
        double smallest = 0.0;
        for (const double v : values)
            if (v != 0.0 && (smallest == 0.0 || v < smallest)) smallest = v;
        if (smallest == 0.0)
            throw std::invalid_argument("median_split_point: all values zero");
        return smallest;
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

SplitReport heterogeneity_split(const std::vector<PanelRow>& panel,
                                const std::string& moderator, int period) {
    std::vector<int> excluded;
    const auto obs = cross_section(panel, period, excluded);

    std::vector<double> values;
    values.reserve(obs.size());
    for (const auto& [id, o] : obs) {
        const auto it = o.moderators->find(moderator);
        if (it == o.moderators->end())
            throw std::invalid_argument("heterogeneity_split: market " + std::to_string(id) +
                                        " lacks moderator " + moderator);
        values.push_back(it->second);
    }
    if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) ==
        values.end())
        throw std::invalid_argument("heterogeneity_split: moderator is constant, no valid split");

    const double split = median_split_point(values);
    const auto above = static_cast<std::size_t>(std::count_if(
        values.begin(), values.end(), [&](double v) { return v >= split; }));
    if (above == 0 || above == values.size())
        throw std::invalid_argument(
            "heterogeneity_split: split point puts every market on one side");
    const bool three_arm = has_control(obs);
    const int k = three_arm ? 7 : 5;

    Eigen::MatrixXd design(obs.size(), k);
    Eigen::VectorXd response(obs.size());
    Eigen::Index i = 0;
    for (const auto& [id, o] : obs) {
        const double x = values[i] >= split ? 1.0 : 0.0;
        const double yes = o.treatment == Arm::Yes ? 1.0 : 0.0;
        const double control = o.treatment == Arm::Control ? 1.0 : 0.0;
        int c = 0;
        design(i, c++) = 1.0;
        design(i, c++) = yes;
        if (three_arm) design(i, c++) = control;
        design(i, c++) = o.baseline;
        design(i, c++) = yes * x;
        if (three_arm) design(i, c++) = control * x;
        design(i, c++) = o.baseline * x;
        response(i) = o.price;
        ++i;
    }
    std::vector<std::string> names =
        three_arm ? std::vector<std::string>{"const", "yes", "control", "p_baseline",
                                             "yes_x", "control_x", "p_baseline_x"}
                  : std::vector<std::string>{"const", "yes", "p_baseline", "yes_x",
                                             "p_baseline_x"};
    SplitReport result{ols(design, response, std::move(names)), split};
    result.report.excluded_markets = std::move(excluded);
    return result;
}

std::vector<PanelRow> inject_spillovers(std::vector<PanelRow> panel,
                                        const std::vector<Spillover>& weights,
                                        const std::set<int>& sources,
                                        const std::set<int>& targets) {
    for (const int s : sources)
        if (targets.count(s))
            throw std::invalid_argument("inject_spillovers: source and target sets overlap");
    std::map<int, Arm> treatment;
    for (const auto& row : panel) treatment.emplace(row.market_id, row.treatment);

    std::map<int, double> shift;
    for (const auto& w : weights) {
        if (!sources.count(w.source) || !targets.count(w.target))
            throw std::invalid_argument(
                "inject_spillovers: weight outside targets x sources support");
        const auto it = treatment.find(w.source);
        if (it == treatment.end())
            throw std::invalid_argument("inject_spillovers: unknown source market");
        shift[w.target] += it->second == Arm::Yes ? w.weight : -w.weight;
    }
    for (auto& row : panel) {
        const auto it = shift.find(row.market_id);
        if (it != shift.end()) row.price += it->second;
    }
    return panel;
}

}  // namespace ammlab
