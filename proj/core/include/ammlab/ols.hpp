#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ammlab {

struct TestResult {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
};

struct EstimateReport {
    std::vector<std::string> coefficient_names;
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd robust_covariance;  // HC1 sandwich
    int n_obs = 0;
    double r_squared = 0.0;
    std::vector<TestResult> tests;
    std::vector<int> excluded_markets;  // markets dropped for missing periods

    double coefficient(const std::string& name) const;
    double robust_se(const std::string& name) const;
    int index_of(const std::string& name) const;  // -1 if absent
};

// Least squares via Householder QR with HC1 heteroskedasticity-robust
// covariance: (n/(n-k)) (X'X)^-1 (sum e_i^2 x_i x_i') (X'X)^-1.
// R^2 uses the intercept convention. Throws on rank deficiency, naming the
// offending column.
EstimateReport ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                   std::vector<std::string> names);

// Wald F test of a single linear restriction r'beta = 0 against F(1, n-k).
TestResult wald_restriction(const EstimateReport& report, const Eigen::VectorXd& r,
                            const std::string& name);

}  // namespace ammlab
