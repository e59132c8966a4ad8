#include "ammlab/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "ammlab/rng.hpp"

namespace ammlab {

void SimConfig::validate() const {
    if (num_traders_index < 1)
        throw std::invalid_argument("SimConfig: m must be >= 1");
    if (!(initial_wealth > 0.0))
        throw std::invalid_argument("SimConfig: initial wealth must be positive");
    if (!(initial_yes_reserve > 0.0) || !(initial_no_reserve > 0.0))
        throw std::invalid_argument("SimConfig: reserves must be positive");
    if (!(maniswap_exponent > 0.0) || !(maniswap_exponent < 1.0))
        throw std::invalid_argument("SimConfig: maniswap exponent must lie in (0,1)");
    if (learning_rate < 0.0 || learning_rate > 1.0)
        throw std::invalid_argument("SimConfig: learning rate must lie in [0,1]");
    if (agreement < 0.0 || agreement > 1.0)
        throw std::invalid_argument("SimConfig: agreement must lie in [0,1]");
    if (warmup_periods < 0)
        throw std::invalid_argument("SimConfig: warmup periods must be >= 0");
    if (post_periods < 1)
        throw std::invalid_argument("SimConfig: post periods must be >= 1");
    if (replications < 1)
        throw std::invalid_argument("SimConfig: replications must be >= 1");
    MarketState initial{initial_yes_reserve, initial_no_reserve, maniswap_exponent};
    const double p0 = marginal_price(initial);
    if (std::abs(shock_size) >= std::min(p0, 1.0 - p0))
        throw std::invalid_argument("SimConfig: |shock| must be < min(p0, 1-p0)");
}

std::vector<Trader> init_population(const SimConfig& config) {
    std::vector<Trader> traders;
    traders.reserve(config.num_traders_index + 1);
    const double m = config.num_traders_index;
    for (int i = 0; i <= config.num_traders_index; ++i) {
        const double prior = config.agreement * (i / m) + (1.0 - config.agreement) * 0.5;
        traders.push_back({prior, config.initial_wealth, Holding::None, 0.0});
    }
    return traders;
}

ReplicationOutcome run_replication_detail(const SimConfig& config,
                                          std::uint64_t replication_index) {
    config.validate();

    ReplicationOutcome out;
    out.market = MarketState{config.initial_yes_reserve, config.initial_no_reserve,
                             config.maniswap_exponent};
    out.traders = init_population(config);
    out.path.replication_index = replication_index;
    out.path.shock_index = static_cast<std::size_t>(config.warmup_periods);
    out.path.prices.reserve(config.warmup_periods + config.post_periods + 1);

    RngStream rng(config.base_seed, replication_index);
    const auto population = static_cast<std::uint64_t>(config.num_traders_index + 1);

    auto one_period = [&] {
        Trader& trader = out.traders[rng.next_below(population)];
        readjust(trader, out.market, config.learning_rate);
        out.path.prices.push_back(marginal_price(out.market));
    };

    for (int period = 0; period < config.warmup_periods; ++period) one_period();
    out.warmup_volume = out.market.volume;
    out.warmup_trades = out.market.num_trades;

    // External manipulator: moves the realised price by exactly shock_size and
    // never liquidates.
    if (config.shock_size != 0.0) {
        const double target = marginal_price(out.market) + config.shock_size;
        const Order shock = spend_for_target_price(out.market, target);
        buy(out.market, shock);
        out.shock_spend = shock.spend;
    }
    out.path.prices.push_back(marginal_price(out.market));

    for (int period = 0; period < config.post_periods; ++period) one_period();
    return out;
}

PricePath run_replication(const SimConfig& config, std::uint64_t replication_index) {
    return run_replication_detail(config, replication_index).path;
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AMMLAB_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed > 0) return static_cast<unsigned>(parsed);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

AveragedPath run_monte_carlo(const SimConfig& config, unsigned max_threads) {
    config.validate();

    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t len =
        static_cast<std::size_t>(config.warmup_periods + config.post_periods + 1);
    std::vector<double> all(reps * len);

    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_thread_count(max_threads), reps));
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const PricePath path = run_replication(config, r);
            std::copy(path.prices.begin(), path.prices.end(), all.begin() + r * len);
        }
    };
    if (workers <= 1) {
        run_range(0, reps);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (reps + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t begin = t * chunk;
            pool.emplace_back(run_range, begin, std::min(begin + chunk, reps));
        }
        for (auto& t : pool) t.join();
    }

    // Fixed replication order reduction: identical bytes for any worker count.
    AveragedPath avg;
    avg.shock_index = static_cast<std::size_t>(config.warmup_periods);
    avg.replications = config.replications;
    avg.mean_prices.assign(len, 0.0);
    avg.standard_errors.assign(len, 0.0);
    for (std::size_t r = 0; r < reps; ++r)
        for (std::size_t i = 0; i < len; ++i) avg.mean_prices[i] += all[r * len + i];
    for (double& mean : avg.mean_prices) mean /= static_cast<double>(reps);
    if (reps > 1) {
        for (std::size_t r = 0; r < reps; ++r)
            for (std::size_t i = 0; i < len; ++i) {
                const double d = all[r * len + i] - avg.mean_prices[i];
                avg.standard_errors[i] += d * d;
            }
        for (double& se : avg.standard_errors)
            se = std::sqrt(se / static_cast<double>(reps - 1)) /
                 std::sqrt(static_cast<double>(reps));
    }
    return avg;
}

Reversion reversion_coefficients(const AveragedPath& path, double shock_size) {
    if (shock_size == 0.0)
        throw std::invalid_argument("reversion_coefficients: shock size must be nonzero");
    const std::size_t s = path.shock_index;
    if (path.mean_prices.size() < s + 101)
        throw std::invalid_argument(
            "reversion_coefficients: need at least 100 post-shock periods");
    const double p0 = path.mean_prices[s];
    return {(p0 - path.mean_prices[s + 3]) / shock_size,
            (p0 - path.mean_prices[s + 100]) / shock_size};
}

std::vector<SweepRow> sweep(const SimConfig& base_config, SweepAxis axis,
                            const std::vector<double>& values, unsigned max_threads) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const double value : values) {
        SimConfig config = base_config;
        switch (axis) {
            case SweepAxis::LearningRate:
                config.learning_rate = value;
                break;
            case SweepAxis::Agreement:
                config.agreement = value;
                break;
            case SweepAxis::NumTraders: {
                const int m = static_cast<int>(value);
                if (m != value)
                    throw std::invalid_argument("sweep: m values must be integers");
                config.num_traders_index = m;
                break;
            }
        }
        const AveragedPath path = run_monte_carlo(config, max_threads);
        rows.push_back({value, reversion_coefficients(path, config.shock_size)});
    }
    return rows;
}

}  // namespace ammlab
