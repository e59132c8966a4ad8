#include "ammlab/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace ammlab {

namespace {

constexpr double kCashMargin = 1e-12;  // keeps ln(w - x) away from ln(0)
constexpr double kBeliefCorner = 1e-12;

// Success probability of a bet on `side` under belief pi.
double pi_side(Side side, double belief) {
    return side == Side::Yes ? belief : 1.0 - belief;
}

// Interior optimum of pi*ln(w + q(x) - x) + (1-pi)*ln(w - x) for a yes
// purchase on a constant product pool with pi > n/(n+y).
double closed_form_spend(double pi, double w, double y, double n) {
    const double a = 1.0 - pi;
    const double k = n * y;
    const double root = std::sqrt(k * (k + 4.0 * pi * a * w * (n + w + y)));
    return (root - n * (2.0 * a * w + y)) / (2.0 * a * (w + y));
}

// Golden-section maximisation of expected log utility over spend.
double searched_spend(double pi, double w, const MarketState& state, Side side) {
    auto objective = [&](double x) {
        MarketState probe = state;
        const Fill f = buy(probe, {side, x});
        const double win = pi_side(side, pi);
        return win * std::log(w + f.shares_received - x) +
               (1.0 - win) * std::log(w - x);
    };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = w * (1.0 - kCashMargin);
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = objective(c), fd = objective(d);
    for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + w); ++i) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = objective(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = objective(d);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double posterior_belief(double prior, double price, double learning_rate) {
    return learning_rate * price + (1.0 - learning_rate) * prior;
}

Order optimal_order(double belief, double cash, const MarketState& state) {
    validate(state);
    if (!(cash > 0.0) || !std::isfinite(cash))
        throw std::invalid_argument("optimal_order: cash must be positive");
    if (!(belief >= 0.0) || !(belief <= 1.0))
        throw std::invalid_argument("optimal_order: belief must lie in [0,1]");

    const double p = marginal_price(state);
    if (belief == p) return {Side::Yes, 0.0};
    const Side side = belief > p ? Side::Yes : Side::No;
    const double win = pi_side(side, belief);  // success probability of the bet

    const double cap = cash * (1.0 - kCashMargin);
    double spend;
    if (win >= 1.0 - kBeliefCorner) {
        // Certain traders take the corner: expected utility is ln(w + q - x)
        // and q(x) - x grows with x.
        spend = cap;
    } else if (state.is_constant_product()) {
        const double base = side == Side::Yes ? state.yes_reserve : state.no_reserve;
        const double quote = side == Side::Yes ? state.no_reserve : state.yes_reserve;
        spend = closed_form_spend(win, cash, base, quote);
    } else {
        spend = searched_spend(belief, cash, state, side);
    }

    if (!(spend > 0.0)) return {side, 0.0};
    return {side, spend < cap ? spend : cap};
}

void readjust(Trader& trader, MarketState& state, double learning_rate) {
    const double observed = marginal_price(state);
    const double posterior =
        posterior_belief(trader.prior_belief, observed, learning_rate);

    if (trader.holding_side == Holding::None && posterior == observed) return;

    if (trader.holding_side != Holding::None) {
        const Side held = trader.holding_side == Holding::Yes ? Side::Yes : Side::No;
        trader.cash += sell(state, held, trader.holding_shares);
        trader.holding_side = Holding::None;
        trader.holding_shares = 0.0;
    }

    if (!(trader.cash > 0.0)) return;
    const Order order = optimal_order(posterior, trader.cash, state);
    if (order.spend == 0.0) return;

    const Fill fill = buy(state, order);
    trader.cash -= order.spend;
    trader.holding_side = order.side == Side::Yes ? Holding::Yes : Holding::No;
    trader.holding_shares = fill.shares_received;
}

}  // namespace ammlab
