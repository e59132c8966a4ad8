#include "ammlab/amm.hpp"

#include <cmath>
#include <stdexcept>

namespace ammlab {

namespace {

// A trade-side view of the pool: `base` is the reserve of the share being
// bought, `quote` the other one, `exp` the invariant weight on `base`.
struct SideView {
    double base;
    double quote;
    double exp;
};

SideView view(const MarketState& s, Side side) {
    if (side == Side::Yes) return {s.yes_reserve, s.no_reserve, s.exponent};
    return {s.no_reserve, s.yes_reserve, 1.0 - s.exponent};
}

void store(MarketState& s, Side side, double base, double quote) {
    if (side == Side::Yes) {
        s.yes_reserve = base;
        s.no_reserve = quote;
    } else {
        s.no_reserve = base;
        s.yes_reserve = quote;
    }
}

// Post-trade reserve of the bought side after spending x. Computed as a pure
// product so no cancellation occurs even for extreme spends.
double base_after_spend(const SideView& v, double x) {
    if (v.exp == 0.5) return v.base * v.quote / (v.quote + x);
    const double r = (1.0 - v.exp) / v.exp;
    return v.base * std::exp(-r * std::log1p(x / v.quote));
}

// Shares received for a spend of x, seen from the bought side. The log1p /
// expm1 forms keep full relative precision for spends far below the reserves.
double shares_for_spend(const SideView& v, double x) {
    if (x == 0.0) return 0.0;
    if (v.exp == 0.5) return x * (v.quote + x + v.base) / (v.quote + x);
    const double r = (1.0 - v.exp) / v.exp;
    return x - v.base * std::expm1(-r * std::log1p(x / v.quote));
}

constexpr int kMaxBisect = 200;
constexpr double kPriceTol = 1e-12;

}  // namespace

void validate(const MarketState& state) {
    if (!(state.yes_reserve > 0.0) || !std::isfinite(state.yes_reserve) ||
        !(state.no_reserve > 0.0) || !std::isfinite(state.no_reserve))
        throw std::invalid_argument("MarketState: reserves must be positive and finite");
    if (!(state.exponent > 0.0) || !(state.exponent < 1.0))
        throw std::invalid_argument("MarketState: exponent must lie in (0,1)");
}

double marginal_price(const MarketState& s) {
    const double y = s.yes_reserve, n = s.no_reserve, p = s.exponent;
    if (s.is_constant_product()) return n / (n + y);
    return n * p / (n * p - p * y + y);
}

double invariant(const MarketState& s) {
    return std::exp(s.exponent * std::log(s.yes_reserve) +
                    (1.0 - s.exponent) * std::log(s.no_reserve));
}

Fill buy(MarketState& state, const Order& order) {
    validate(state);
    if (!std::isfinite(order.spend) || order.spend < 0.0)
        throw std::invalid_argument("buy: spend must be finite and nonnegative");

    Fill fill;
    fill.spend = order.spend;
    fill.price_before = marginal_price(state);
    if (order.spend == 0.0) {
        fill.price_after = fill.price_before;
        return fill;
    }

    const SideView v = view(state, order.side);
    const double q = shares_for_spend(v, order.spend);
    store(state, order.side, base_after_spend(v, order.spend), v.quote + order.spend);

    fill.shares_received = q;
    fill.price_after = marginal_price(state);
    state.cash_in += order.spend;
    state.volume += order.spend;
    ++state.num_trades;
    return fill;
}

double sell(MarketState& state, Side side, double shares) {
    validate(state);
    if (!std::isfinite(shares) || shares < 0.0)
        throw std::invalid_argument("sell: shares must be finite and nonnegative");
    if (shares == 0.0) return 0.0;

    const SideView v = view(state, side);
    double proceeds;
    if (v.exp == 0.5) {
        // (base + q - x')(quote - x') = base*quote, smaller root.
        const double s = v.base + v.quote + shares;
        const double disc = s * s - 4.0 * shares * v.quote;
        if (disc <= 0.0) throw std::domain_error("sell: no valid liquidation root");
        proceeds = 2.0 * shares * v.quote / (s + std::sqrt(disc));
    } else {
        // Root of f(t) = p*log1p((q - t)/base) + (1-p)*log1p(-t/quote) on
        // (0, min(q, quote)); f decreases strictly and the log1p form keeps
        // relative precision when the trade is tiny next to the reserves.
        auto f = [&](double t) {
            return v.exp * std::log1p((shares - t) / v.base) +
                   (1.0 - v.exp) * std::log1p(-t / v.quote);
        };
        double lo = 0.0;
        double hi = shares < v.quote ? shares : v.quote * (1.0 - 1e-12);
        for (int i = 0; i < kMaxBisect; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
            if (hi - lo < 1e-12 * hi) break;
        }
        proceeds = 0.5 * (lo + hi);
        for (int i = 0; i < 3; ++i) {  // Newton polish to full precision
            const double b = v.base + shares - proceeds;
            const double q = v.quote - proceeds;
            if (!(b > 0.0) || !(q > 0.0)) break;
            const double slope = -v.exp / b - (1.0 - v.exp) / q;
            const double next = proceeds - f(proceeds) / slope;
            if (!(next > 0.0) || !(next < v.quote)) break;
            proceeds = next;
        }
    }

    const double new_base = v.base + shares - proceeds;
    const double new_quote = v.quote - proceeds;
    if (!(new_base > 0.0) || !(new_quote > 0.0))
        throw std::domain_error("sell: liquidation would empty a reserve");
    store(state, side, new_base, new_quote);
    state.cash_in -= proceeds;
    state.volume += proceeds;
    ++state.num_trades;
    return proceeds;
}

double cost(const MarketState& state, Side side, double shares) {
    validate(state);
    if (!std::isfinite(shares) || shares < 0.0)
        throw std::invalid_argument("cost: shares must be finite and nonnegative");
    if (shares == 0.0) return 0.0;

    const SideView v = view(state, side);
    if (v.exp == 0.5) {
        const double d = v.quote - shares + v.base;
        const double root = std::sqrt(d * d + 4.0 * v.quote * shares);
        // Equivalent closed forms; pick the one without cancellation.
        if (d > 0.0) return 2.0 * v.quote * shares / (root + d);
        return 0.5 * (root - d);
    }
    // Invert the monotone spend -> shares map by bisection.
    double hi = shares > 1.0 ? shares : 1.0;
    while (shares_for_spend(v, hi) < shares) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        (shares_for_spend(v, mid) < shares ? lo : hi) = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    double x = 0.5 * (lo + hi);
    const double r = (1.0 - v.exp) / v.exp;
    for (int i = 0; i < 3; ++i) {  // Newton polish
        const double slope =
            1.0 + v.base * r * std::pow(v.quote / (v.quote + x), r) / (v.quote + x);
        const double next = x - (shares_for_spend(v, x) - shares) / slope;
        if (!(next > 0.0)) break;
        x = next;
    }
    return x;
}

double marginal_cost(const MarketState& state, Side side, double shares) {
    validate(state);
    if (!std::isfinite(shares) || shares < 0.0)
        throw std::invalid_argument("marginal_cost: shares must be finite and nonnegative");

    const SideView v = view(state, side);
    if (v.exp == 0.5) {
        const double d = v.quote - shares + v.base;
        return 0.5 * ((v.quote + shares - v.base) / std::sqrt(d * d + 4.0 * v.quote * shares) + 1.0);
    }
    // MC(q) = 1 / (dq/dx) at the spend x that delivers q.
    const double x = cost(state, side, shares);
    const double r = (1.0 - v.exp) / v.exp;
    const double slope = 1.0 + v.base * r * std::pow(v.quote / (v.quote + x), r) / (v.quote + x);
    return 1.0 / slope;
}

double average_cost(const MarketState& state, Side side, double shares) {
    if (shares == 0.0)
        throw std::invalid_argument("average_cost: undefined at q = 0; use marginal_cost(0)");
    return cost(state, side, shares) / shares;
}

Order spend_for_target_price(const MarketState& state, double target_price) {
    validate(state);
    if (!(target_price > 0.0) || !(target_price < 1.0))
        throw std::invalid_argument("spend_for_target_price: target must lie in (0,1)");

    const double current = marginal_price(state);
    if (target_price == current) return {Side::Yes, 0.0};
    const Side side = target_price > current ? Side::Yes : Side::No;

    if (state.is_constant_product()) {
        const double k = state.yes_reserve * state.no_reserve;
        // Buying moves the quote-side reserve to sqrt(k * t' / (1 - t')) where
        // t' is the target probability of the bought side.
        const double t = side == Side::Yes ? target_price : 1.0 - target_price;
        const double quote = side == Side::Yes ? state.no_reserve : state.yes_reserve;
        return {side, std::sqrt(k * t / (1.0 - t)) - quote};
    }

    double hi = 1.0;
    auto price_after = [&](double x) {
        MarketState probe = state;
        return marginal_price((buy(probe, {side, x}), probe));
    };
    auto past_target = [&](double p) {
        return side == Side::Yes ? p >= target_price : p <= target_price;
    };
    while (!past_target(price_after(hi))) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < kMaxBisect; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double p = price_after(mid);
        (past_target(p) ? hi : lo) = mid;
        if (std::abs(p - target_price) < kPriceTol) return {side, mid};
    }
    return {side, 0.5 * (lo + hi)};
}

}  // namespace ammlab
