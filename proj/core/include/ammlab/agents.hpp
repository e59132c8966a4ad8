#pragma once

#include "ammlab/amm.hpp"

namespace ammlab {

enum class Holding { Yes, No, None };

// A risk-averse (log utility) market participant. The prior is fixed at
// construction; learning produces a transient posterior via posterior_belief.
struct Trader {
    double prior_belief = 0.5;  // pi_i in [0,1]
    double cash = 0.0;          // w
    Holding holding_side = Holding::None;
    double holding_shares = 0.0;
};

struct LearningRule {
    double learning_rate = 0.0;  // lambda in [0,1]
};

// pi' = lambda * price + (1 - lambda) * prior. Non-compounding: the blend is
// always taken from the immutable prior.
double posterior_belief(double prior, double price, double learning_rate);

// Expected-log-utility-maximising order against the current pool. The side
// follows the sign of belief minus marginal price; the spend is the interior
// optimum of pi*ln(w + q(x) - x) + (1-pi)*ln(w - x), via the closed form for
// constant product pools and golden-section search otherwise. Always < cash.
Order optimal_order(double belief, double cash, const MarketState& state);

// One re-adjustment step: form the posterior from the pre-liquidation price,
// liquidate any holding, then place the optimal order at the resulting state.
void readjust(Trader& trader, MarketState& state, double learning_rate);

}  // namespace ammlab
