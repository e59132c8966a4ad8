#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "ammlab/agents.hpp"
#include "ammlab/amm.hpp"
#include "ammlab/rng.hpp"

using namespace ammlab;

namespace {

// Expected log utility of spending x on `side` with belief pi and cash w.
double expected_log_utility(double pi, double w, const MarketState& state, Side side,
                            double x) {
    MarketState probe = state;
    const Fill f = buy(probe, {side, x});
    const double win = side == Side::Yes ? pi : 1.0 - pi;
    return win * std::log(w + f.shares_received - x) + (1.0 - win) * std::log(w - x);
}

// Independent oracle: ternary search for the maximiser, agnostic of any closed
// form the library uses internally.
double oracle_spend(double pi, double w, const MarketState& state, Side side) {
    double lo = 0.0, hi = w * (1.0 - 1e-12);
    for (int i = 0; i < 300 && hi - lo > 1e-13 * (1.0 + w); ++i) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (expected_log_utility(pi, w, state, side, a) <
            expected_log_utility(pi, w, state, side, b))
            lo = a;
        else
            hi = b;
    }
    return 0.5 * (lo + hi);
}

// d/dx of expected log utility for a yes purchase on a constant product pool,
// written directly from the trade closed forms.
double foc_residual_yes(double pi, double w, double y, double n, double x) {
    const double q = x * (n + x + y) / (n + x);
    const double dq = 1.0 + n * y / ((n + x) * (n + x));
    return pi * (dq - 1.0) / (w + q - x) - (1.0 - pi) / (w - x);
}

}  // namespace

TEST_CASE("posterior_belief examples") {
    CHECK(posterior_belief(0.8, 0.4, 0.0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(posterior_belief(0.8, 0.4, 1.0) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(posterior_belief(0.8, 0.4, 0.25) == doctest::Approx(0.7).epsilon(1e-12));
    // Non-compounding: blending twice from the same prior is idempotent in the
    // prior argument, not in the output.
    const double once = posterior_belief(0.8, 0.4, 0.25);
    CHECK(posterior_belief(0.8, 0.4, 0.25) == once);
}

TEST_CASE("optimal_order worked example: pi=0.7, w=100, balanced pool") {
    const MarketState s{1000, 1000, 0.5};
    const Order order = optimal_order(0.7, 100.0, s);
    CHECK(order.side == Side::Yes);
    CHECK(order.spend == doctest::Approx(37.3027).epsilon(1e-4));
    CHECK(order.spend == doctest::Approx(oracle_spend(0.7, 100.0, s, Side::Yes))
                             .epsilon(1e-6));
    CHECK(std::abs(foc_residual_yes(0.7, 100.0, 1000.0, 1000.0, order.spend)) < 1e-8);
}

TEST_CASE("trade-sign trichotomy over 10^4 random instances") {
    RngStream rng(101, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        MarketState s;
        s.yes_reserve = rng.uniform(100.0, 5000.0);
        s.no_reserve = rng.uniform(100.0, 5000.0);
        const double pi = rng.uniform(0.01, 0.99);
        const double w = std::exp(rng.uniform(std::log(1.0), std::log(1e4)));
        const double p = marginal_price(s);
        const Order order = optimal_order(pi, w, s);
        if (pi > p) {
            REQUIRE(order.side == Side::Yes);
            REQUIRE(order.spend > 0.0);
        } else if (pi < p) {
            REQUIRE(order.side == Side::No);
            REQUIRE(order.spend > 0.0);
        } else {
            REQUIRE(order.spend == 0.0);
        }
        REQUIRE(order.spend < w);
    }
}

TEST_CASE("closed form agrees with the search oracle across regimes") {
    RngStream rng(103, 0);
    for (int trial = 0; trial < 300; ++trial) {
        MarketState s;
        s.yes_reserve = rng.uniform(200.0, 4000.0);
        s.no_reserve = rng.uniform(200.0, 4000.0);
        const double p = marginal_price(s);
        const double pi = rng.uniform(0.05, 0.95);
        if (std::abs(pi - p) < 0.02) continue;
        const double w = std::exp(rng.uniform(std::log(10.0), std::log(2000.0)));
        const Order order = optimal_order(pi, w, s);
        const double oracle = oracle_spend(pi, w, s, order.side);
        REQUIRE(order.spend ==
                doctest::Approx(oracle).epsilon(1e-6).scale(1.0 + oracle));
        if (order.side == Side::Yes)
            REQUIRE(std::abs(foc_residual_yes(pi, w, s.yes_reserve, s.no_reserve,
                                              order.spend)) < 1e-8);
    }
}

TEST_CASE("general exponent pools use the search and match the oracle") {
    RngStream rng(107, 0);
    for (int trial = 0; trial < 100; ++trial) {
        MarketState s;
        s.yes_reserve = rng.uniform(300.0, 3000.0);
        s.no_reserve = rng.uniform(300.0, 3000.0);
        s.exponent = rng.uniform(0.2, 0.8);
        const double p = marginal_price(s);
        const double pi = rng.uniform(0.05, 0.95);
        if (std::abs(pi - p) < 0.02) continue;
        const double w = rng.uniform(20.0, 500.0);
        const Order order = optimal_order(pi, w, s);
        const double oracle = oracle_spend(pi, w, s, order.side);
        REQUIRE(order.spend ==
                doctest::Approx(oracle).epsilon(1e-6).scale(1.0 + oracle));
    }
}

TEST_CASE("directional response of spend to price moves") {
    // A yes-side trader's optimal spend grows as the price falls away from
    // the belief, and a no-side trader's grows as the price rises away from it.
    const double pi = 0.7, w = 100.0;
    double prev = -1.0;
    for (double ratio : {0.8, 1.0, 1.25}) {  // price 5/9, 1/2, 4/9, all < pi
        MarketState s{1000.0 * ratio, 1000.0, 0.5};
        const Order o = optimal_order(pi, w, s);
        REQUIRE(o.side == Side::Yes);
        if (prev >= 0.0) REQUIRE(o.spend > prev);
        prev = o.spend;
    }
    prev = -1.0;
    for (double price_shift : {0.75, 0.8, 0.85}) {  // price > pi, rising
        MarketState s{1000.0, 1000.0, 0.5};
        buy(s, spend_for_target_price(s, price_shift));
        const Order o = optimal_order(pi, w, s);
        REQUIRE(o.side == Side::No);
        if (prev >= 0.0) REQUIRE(o.spend > prev);
        prev = o.spend;
    }
}

TEST_CASE("mirror symmetry of the optimum") {
    RngStream rng(109, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        MarketState s;
        s.yes_reserve = rng.uniform(200.0, 4000.0);
        s.no_reserve = rng.uniform(200.0, 4000.0);
        const double pi = rng.uniform(0.05, 0.95);
        const double w = rng.uniform(10.0, 1000.0);
        const Order a = optimal_order(pi, w, s);

        MarketState mirror{s.no_reserve, s.yes_reserve, 0.5};
        const Order b = optimal_order(1.0 - pi, w, mirror);
        REQUIRE(b.side == opposite(a.side));
        REQUIRE(b.spend == doctest::Approx(a.spend).epsilon(1e-9).scale(1.0 + a.spend));
    }
}

TEST_CASE("corner beliefs spend all cash up to the margin") {
    const MarketState s{1000, 1000, 0.5};
    const Order sure = optimal_order(1.0, 50.0, s);
    CHECK(sure.side == Side::Yes);
    CHECK(sure.spend == doctest::Approx(50.0 * (1.0 - 1e-12)).epsilon(1e-15));
    const Order doomed = optimal_order(0.0, 50.0, s);
    CHECK(doomed.side == Side::No);
    CHECK(doomed.spend == doctest::Approx(50.0 * (1.0 - 1e-12)).epsilon(1e-15));
}

TEST_CASE("optimal_order input validation") {
    const MarketState s{1000, 1000, 0.5};
    CHECK_THROWS_AS(optimal_order(0.7, 0.0, s), std::invalid_argument);
    CHECK_THROWS_AS(optimal_order(0.7, -5.0, s), std::invalid_argument);
    CHECK_THROWS_AS(optimal_order(1.5, 100.0, s), std::invalid_argument);
    CHECK_THROWS_AS(optimal_order(-0.1, 100.0, s), std::invalid_argument);
}

TEST_CASE("readjust: fresh trader places the optimal order") {
    MarketState s{1000, 1000, 0.5};
    Trader t{0.7, 100.0, Holding::None, 0.0};
    readjust(t, s, 0.0);
    CHECK(t.holding_side == Holding::Yes);
    CHECK(t.cash == doctest::Approx(100.0 - 37.3027).epsilon(1e-4));
    CHECK(t.holding_shares > 0.0);
    CHECK(marginal_price(s) > 0.5);
    CHECK(s.num_trades == 1);
}

TEST_CASE("readjust: liquidation restores the pool before re-optimising") {
    MarketState s{1000, 1000, 0.5};
    Trader t{0.7, 100.0, Holding::None, 0.0};
    readjust(t, s, 0.0);
    const double price_after_entry = marginal_price(s);

    // A second pass with an unchanged environment re-derives the same
    // position: liquidation returns the pool to balance, then the same order
    // is placed against it.
    Trader copy = t;
    readjust(t, s, 0.0);
    CHECK(t.cash == doctest::Approx(copy.cash).epsilon(1e-9));
    CHECK(t.holding_shares == doctest::Approx(copy.holding_shares).epsilon(1e-9));
    CHECK(marginal_price(s) == doctest::Approx(price_after_entry).epsilon(1e-12));
}

TEST_CASE("readjust: posterior comes from the pre-liquidation price") {
    MarketState s{1000, 1000, 0.5};
    buy(s, spend_for_target_price(s, 0.6));  // outside money moves the price
    Trader t{0.5, 100.0, Holding::None, 0.0};
    // With lambda = 1 the trader adopts the observed price 0.6. Liquidating
    // nothing, it would buy only if the price after liquidation were below the
    // posterior; here the price stays 0.6 so no trade happens.
    readjust(t, s, 1.0);
    CHECK(t.holding_side == Holding::None);
    CHECK(t.cash == 100.0);
}

TEST_CASE("readjust: lambda=1 holder chases the pre-liquidation price") {
    MarketState s{1000, 1000, 0.5};
    Trader t{0.9, 100.0, Holding::None, 0.0};
    readjust(t, s, 0.0);
    REQUIRE(t.holding_side == Holding::Yes);
    // Fully credulous pass: the posterior equals the pre-liquidation price,
    // which exceeds the post-liquidation price, so the trader re-enters on the
    // yes side but with a spend determined by the price gap, not the prior.
    readjust(t, s, 1.0);
    CHECK(t.holding_side == Holding::Yes);
}
