#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ammlab/ols.hpp"
#include "ammlab/sim.hpp"

namespace ammlab {

enum class Arm { Yes, No, Control };

std::string to_string(Arm arm);
Arm arm_from_string(const std::string& text);

// One market-period observation of the synthetic experiment.
struct PanelRow {
    int market_id = 0;
    int period = 0;  // post-shock index; 0 is the shock period
    double price = 0.0;
    Arm treatment = Arm::Control;
    double baseline_price = 0.0;  // price just before the shock
    std::map<std::string, double> moderators;
};

// Synthetic data-generating process: market parameters are drawn per market
// from these uniform grids, then each market runs one shock replication.
struct ExperimentConfig {
    int num_markets = 90;
    double yes_probability = 1.0 / 3.0;
    double no_probability = 1.0 / 3.0;
    double control_probability = 1.0 / 3.0;
    double shock_magnitude = 0.05;
    int horizon = 100;  // post-shock periods recorded
    int warmup_periods = 100;
    double initial_wealth = 100.0;
    std::vector<double> reserve_choices = {1000.0};
    std::vector<int> m_choices = {10};
    std::vector<double> lambda_choices = {0.0};
    std::vector<double> alpha_choices = {1.0};

    void validate() const;
};

// Independent per-market arm draws; deterministic given seed.
std::vector<Arm> assign_treatment(int n_markets,
                                  const std::vector<double>& arm_probabilities,
                                  std::uint64_t seed);

std::vector<PanelRow> generate_panel(const ExperimentConfig& config,
                                     std::uint64_t seed);

// Cross-sectional fit of price at the given period on treatment dummies and
// the baseline price ("no" is the omitted category; the control dummy is
// dropped automatically for two-arm panels). Markets lacking the period are
// excluded and listed in the report.
EstimateReport estimate_treatment_effect(const std::vector<PanelRow>& panel,
                                         int period);

// F test of yes = 2 * control on a three-arm report.
TestResult symmetry_test(const EstimateReport& report);

struct SplitReport {
    EstimateReport report;
    double split_point = 0.0;
};

// Split threshold: the sample median, except when a strict majority of the
// values are zero, in which case the smallest non-zero value.
double median_split_point(const std::vector<double>& values);

// Interaction model: treatment dummies, baseline price, and their three
// interactions with the above-threshold dummy.
SplitReport heterogeneity_split(const std::vector<PanelRow>& panel,
                                const std::string& moderator, int period);

struct Spillover {
    int target = 0;
    int source = 0;
    double weight = 0.0;  // sigma_{target, source}
};

// Adds sigma_{i,j} per yes-treated source and subtracts it per no-treated
// source from every observation of the target market. Sources and targets
// must be disjoint and weights supported on targets x sources.
std::vector<PanelRow> inject_spillovers(std::vector<PanelRow> panel,
                                        const std::vector<Spillover>& weights,
                                        const std::set<int>& sources,
                                        const std::set<int>& targets);

}  // namespace ammlab
