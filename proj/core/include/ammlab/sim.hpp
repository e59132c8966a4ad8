#pragma once

#include <cstdint>
#include <vector>

#include "ammlab/agents.hpp"
#include "ammlab/amm.hpp"

namespace ammlab {

// All knobs for the shock-and-reversion protocol. Population is m+1 traders
// with priors alpha*(i/m) + (1-alpha)*0.5.
struct SimConfig {
    int num_traders_index = 10;  // m
    double initial_wealth = 100.0;
    double initial_yes_reserve = 1000.0;
    double initial_no_reserve = 1000.0;
    double maniswap_exponent = 0.5;
    double learning_rate = 0.0;  // lambda
    double agreement = 1.0;      // alpha
    int warmup_periods = 100;    // t
    int post_periods = 100;      // t'
    double shock_size = 0.05;    // delta, signed; 0 = control
    int replications = 10000;
    std::uint64_t base_seed = 0;

    void validate() const;  // throws std::invalid_argument
};

// Per-replication price series. prices[shock_index] is the price immediately
// after the external shock trade; earlier entries are post-period warm-up
// prices. Length = warmup + post + 1.
struct PricePath {
    std::vector<double> prices;
    std::size_t shock_index = 0;
    std::uint64_t replication_index = 0;
};

struct AveragedPath {
    std::vector<double> mean_prices;
    std::vector<double> standard_errors;  // sample SD / sqrt(reps)
    std::size_t shock_index = 0;
    int replications = 0;
};

// Full end-of-replication state, for audits (cash conservation) and for the
// experiment layer, which needs the final market and moderators.
struct ReplicationOutcome {
    PricePath path;
    std::vector<Trader> traders;
    MarketState market;
    double shock_spend = 0.0;
    double warmup_volume = 0.0;  // gross turnover before the shock
    std::uint64_t warmup_trades = 0;
};

struct Reversion {
    double short_run = 0.0;  // fraction of the shock undone 3 periods out
    double long_run = 0.0;   // ... 100 periods out
};

enum class SweepAxis { LearningRate, Agreement, NumTraders };

struct SweepRow {
    double value = 0.0;
    Reversion reversion;
};

std::vector<Trader> init_population(const SimConfig& config);

// Warm-up -> shock -> adjustment, deterministic in (base_seed, index).
ReplicationOutcome run_replication_detail(const SimConfig& config,
                                          std::uint64_t replication_index);
PricePath run_replication(const SimConfig& config, std::uint64_t replication_index);

// Pointwise average over replications, reduced in fixed index order so the
// result is bit-identical for any worker count. max_threads = 0 defers to
// AMMLAB_THREADS, then hardware concurrency.
AveragedPath run_monte_carlo(const SimConfig& config, unsigned max_threads = 0);

// Positive magnitudes: (p0 - p3)/delta and (p0 - p100)/delta with p0 the
// post-shock price. Requires 100 post-shock periods and delta != 0.
Reversion reversion_coefficients(const AveragedPath& path, double shock_size);

std::vector<SweepRow> sweep(const SimConfig& base_config, SweepAxis axis,
                            const std::vector<double>& values,
                            unsigned max_threads = 0);

unsigned resolve_thread_count(unsigned requested);

}  // namespace ammlab
