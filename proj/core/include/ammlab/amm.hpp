#pragma once

#include <cstdint>

namespace ammlab {

enum class Side { Yes, No };

inline Side opposite(Side s) { return s == Side::Yes ? Side::No : Side::Yes; }

// Binary-outcome AMM state. The pool holds reserves of yes and no shares and
// quotes by keeping y^p * n^(1-p) constant across trades; p = 0.5 is the
// constant product rule, where closed forms are used throughout.
//
// cash_in / volume / num_trades summarise the trade log: net currency absorbed
// by the pool, gross currency turnover, and trade count.
struct MarketState {
    double yes_reserve = 1000.0;  // y
    double no_reserve = 1000.0;   // n
    double exponent = 0.5;        // p in (0,1)

    double cash_in = 0.0;
    double volume = 0.0;
    std::uint64_t num_trades = 0;

    bool is_constant_product() const { return exponent == 0.5; }
};

struct Order {
    Side side = Side::Yes;
    double spend = 0.0;  // x, currency units
};

struct Fill {
    double shares_received = 0.0;  // q
    double spend = 0.0;            // x
    double price_before = 0.0;
    double price_after = 0.0;
};

// Throws std::invalid_argument on out-of-range reserves or exponent.
void validate(const MarketState& state);

// Instantaneous price of an infinitesimal yes purchase: n/(n+y) under the
// constant product rule, n*p/(n*p - p*y + y) in general. Always in (0,1).
double marginal_price(const MarketState& state);

// Executes a spend-denominated purchase against the pool, restoring the
// invariant. Mutates state; rejects negative or non-finite spends.
Fill buy(MarketState& state, const Order& order);

// Exact inverse trade: liquidates q shares for the proceeds x' that restore
// the invariant, so buy(x) followed by sell of the resulting shares is an
// identity round trip. Rejects q that would empty a reserve.
double sell(MarketState& state, Side side, double shares);

// Total cost C(q) of acquiring q shares from the current state.
double cost(const MarketState& state, Side side, double shares);

// dC/dq and C(q)/q. Both increase strictly in q and tend to 1. average_cost
// rejects q = 0; its q->0+ limit equals marginal_cost(0).
double marginal_cost(const MarketState& state, Side side, double shares);
double average_cost(const MarketState& state, Side side, double shares);

// Order that moves the marginal price to target (side chosen by direction).
// Rejects targets outside (0,1).
Order spend_for_target_price(const MarketState& state, double target_price);

// y^p * n^(1-p); the conserved quantity.
double invariant(const MarketState& state);

}  // namespace ammlab
