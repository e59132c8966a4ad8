#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include <doctest.h>

#include "ammlab/rng.hpp"
#include "ammlab/sim.hpp"

using namespace ammlab;

namespace {

SimConfig quick_config() {
    SimConfig c;
    c.replications = 200;
    c.base_seed = 42;
    return c;
}

double total_cash(const ReplicationOutcome& out, const SimConfig& config) {
    double cash = out.market.cash_in;
    for (const Trader& t : out.traders) cash += t.cash;
    (void)config;
    return cash;
}

}  // namespace

TEST_CASE("rng streams are deterministic and decorrelated") {
    RngStream a(99, 0), b(99, 0), c(99, 1);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t x = a.next_u64();
        REQUIRE(x == b.next_u64());
        REQUIRE(x != c.next_u64());
    }
    // Bounded draws stay in range and hit every residue eventually.
    RngStream d(1, 7);
    bool seen[5] = {};
    for (int i = 0; i < 1000; ++i) seen[d.next_below(5)] = true;
    for (bool s : seen) CHECK(s);
    for (int i = 0; i < 1000; ++i) {
        const double u = d.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("init_population priors follow the agreement grid") {
    SimConfig c;
    c.num_traders_index = 10;
    c.agreement = 1.0;
    auto pop = init_population(c);
    REQUIRE(pop.size() == 11);
    for (int i = 0; i <= 10; ++i) {
        CHECK(pop[i].prior_belief == doctest::Approx(i / 10.0).epsilon(1e-12));
        CHECK(pop[i].cash == 100.0);
        CHECK(pop[i].holding_side == Holding::None);
    }
    c.agreement = 0.0;
    pop = init_population(c);
    for (const Trader& t : pop)
        CHECK(t.prior_belief == doctest::Approx(0.5).epsilon(1e-12));
    c.agreement = 0.5;
    pop = init_population(c);
    CHECK(pop[0].prior_belief == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pop[10].prior_belief == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("config validation") {
    SimConfig c = quick_config();
    c.num_traders_index = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    c.learning_rate = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    c.shock_size = 0.6;  // would push the price out of (0,1)
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = quick_config();
    c.replications = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    quick_config().validate();  // baseline passes
}

TEST_CASE("replication anatomy: lengths, shock, and cash conservation") {
    SimConfig c = quick_config();
    const ReplicationOutcome out = run_replication_detail(c, 3);
    REQUIRE(out.path.prices.size() == 201);
    REQUIRE(out.path.shock_index == 100);
    // The shock lands the price exactly on p_pre + delta.
    const double pre = out.path.prices[99];
    CHECK(out.path.prices[100] == doctest::Approx(pre + 0.05).epsilon(1e-9));
    CHECK(out.shock_spend > 0.0);
    for (double p : out.path.prices) {
        REQUIRE(p > 0.0);
        REQUIRE(p < 1.0);
    }
    // Currency absorbed by the pool plus trader cash equals endowment + shock.
    const double endowment = 11 * 100.0 + out.shock_spend;
    CHECK(total_cash(out, c) == doctest::Approx(endowment).epsilon(1e-9));
    CHECK(out.warmup_volume > 0.0);
    CHECK(out.warmup_trades > 0);
}

TEST_CASE("negative shocks mirror positive ones") {
    SimConfig up = quick_config(), down = quick_config();
    down.shock_size = -0.05;
    const AveragedPath pu = run_monte_carlo(up, 2);
    const AveragedPath pd = run_monte_carlo(down, 2);
    const Reversion ru = reversion_coefficients(pu, up.shock_size);
    const Reversion rd = reversion_coefficients(pd, down.shock_size);
    // Both are positive magnitudes and, by the symmetry of the setup, close.
    CHECK(ru.short_run > 0.0);
    CHECK(rd.short_run > 0.0);
    CHECK(ru.short_run == doctest::Approx(rd.short_run).epsilon(0.25));
}

TEST_CASE("zero shock leaves the path flat on average") {
    SimConfig c = quick_config();
    c.shock_size = 0.0;
    const AveragedPath p = run_monte_carlo(c, 2);
    CHECK(std::abs(p.mean_prices[100] - p.mean_prices[99]) < 1e-12);
    CHECK(std::abs(p.mean_prices.back() - 0.5) < 0.02);
    CHECK_THROWS_AS(reversion_coefficients(p, 0.0), std::invalid_argument);
}

TEST_CASE("lambda=1 produces no trades and zero reversion") {
    SimConfig c = quick_config();
    c.learning_rate = 1.0;
    const ReplicationOutcome out = run_replication_detail(c, 0);
    CHECK(out.warmup_trades == 0);
    for (std::size_t i = 0; i < 100; ++i)
        CHECK(out.path.prices[i] == doctest::Approx(0.5).epsilon(1e-15));
    for (std::size_t i = 100; i < out.path.prices.size(); ++i)
        CHECK(out.path.prices[i] == doctest::Approx(0.55).epsilon(1e-12));
    const AveragedPath p = run_monte_carlo(c, 2);
    const Reversion r = reversion_coefficients(p, c.shock_size);
    CHECK(r.short_run == 0.0);
    CHECK(r.long_run == 0.0);
}

TEST_CASE("monte carlo is bit-identical across worker counts") {
    SimConfig c = quick_config();
    const AveragedPath one = run_monte_carlo(c, 1);
    const AveragedPath four = run_monte_carlo(c, 4);
    const AveragedPath three = run_monte_carlo(c, 3);
    REQUIRE(one.mean_prices.size() == four.mean_prices.size());
    for (std::size_t i = 0; i < one.mean_prices.size(); ++i) {
        REQUIRE(one.mean_prices[i] == four.mean_prices[i]);
        REQUIRE(one.mean_prices[i] == three.mean_prices[i]);
        REQUIRE(one.standard_errors[i] == four.standard_errors[i]);
    }
}

TEST_CASE("standard errors shrink like 1/sqrt(reps)") {
    SimConfig small = quick_config();
    SimConfig big = quick_config();
    big.replications = 800;
    const AveragedPath ps = run_monte_carlo(small, 2);
    const AveragedPath pb = run_monte_carlo(big, 2);
    const double ratio = ps.standard_errors[103] / pb.standard_errors[103];
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("reversion requires a long enough horizon") {
    SimConfig c = quick_config();
    c.post_periods = 50;
    const AveragedPath p = run_monte_carlo(c, 2);
    CHECK_THROWS_AS(reversion_coefficients(p, c.shock_size), std::invalid_argument);
}

TEST_CASE("baseline reversion magnitudes at moderate precision") {
    SimConfig c;
    c.replications = 2000;
    c.base_seed = 7;
    const AveragedPath p = run_monte_carlo(c);
    const Reversion r = reversion_coefficients(p, c.shock_size);
    CHECK(r.short_run == doctest::Approx(0.145).epsilon(0.25));
    CHECK(r.long_run == doctest::Approx(0.398).epsilon(0.15));
    CHECK(r.long_run > r.short_run);
}

TEST_CASE("sweep runs each axis and keeps other knobs fixed") {
    SimConfig c = quick_config();
    c.replications = 300;
    const auto rows = sweep(c, SweepAxis::LearningRate, {0.0, 1.0}, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].value == 0.0);
    CHECK(rows[1].value == 1.0);
    CHECK(rows[1].reversion.long_run == 0.0);
    CHECK(rows[0].reversion.long_run > rows[1].reversion.long_run);

    const auto ag = sweep(c, SweepAxis::Agreement, {0.0}, 2);
    REQUIRE(ag.size() == 1);
    CHECK(ag[0].reversion.long_run > rows[0].reversion.long_run);

    const auto nt = sweep(c, SweepAxis::NumTraders, {10.0, 20.0}, 2);
    REQUIRE(nt.size() == 2);
    CHECK(nt[1].reversion.long_run > nt[0].reversion.long_run);
}

TEST_CASE("resolve_thread_count precedence") {
    CHECK(resolve_thread_count(3) == 3);
    setenv("AMMLAB_THREADS", "2", 1);
    CHECK(resolve_thread_count(0) == 2);
    CHECK(resolve_thread_count(5) == 5);
    unsetenv("AMMLAB_THREADS");
    CHECK(resolve_thread_count(0) >= 1);
}
