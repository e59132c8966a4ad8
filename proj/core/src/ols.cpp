#include "ammlab/ols.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/fisher_f.hpp>

namespace ammlab {

int EstimateReport::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < coefficient_names.size(); ++i)
        if (coefficient_names[i] == name) return static_cast<int>(i);
    return -1;
}

double EstimateReport::coefficient(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0) throw std::invalid_argument("no coefficient named " + name);
    return coefficients(i);
}

double EstimateReport::robust_se(const std::string& name) const {
    const int i = index_of(name);
    if (i < 0) throw std::invalid_argument("no coefficient named " + name);
    return std::sqrt(robust_covariance(i, i));
}

EstimateReport ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
                   std::vector<std::string> names) {
    const auto n = design.rows();
    const auto k = design.cols();
    if (response.size() != n)
        throw std::invalid_argument("ols: row count mismatch between X and y");
    if (static_cast<Eigen::Index>(names.size()) != k)
        throw std::invalid_argument("ols: one name required per column");
    if (n <= k) throw std::invalid_argument("ols: need more rows than columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k) {
        // The permutation sorts dependent columns last.
        const auto perm = qr.colsPermutation().indices();
        const int offender = perm(k - 1);
        throw std::invalid_argument("ols: rank-deficient design, column " +
                                    std::to_string(offender) + " (" + names[offender] +
                                    ") is linearly dependent");
    }

    EstimateReport report;
    report.coefficient_names = std::move(names);
    report.n_obs = static_cast<int>(n);
    report.coefficients = qr.solve(response);

    const Eigen::VectorXd residuals = response - design * report.coefficients;
    const Eigen::MatrixXd bread = (design.transpose() * design).inverse();
    const Eigen::MatrixXd meat =
        design.transpose() * residuals.array().square().matrix().asDiagonal() * design;
    const double scale = static_cast<double>(n) / static_cast<double>(n - k);
    Eigen::MatrixXd cov = scale * bread * meat * bread;
    report.robust_covariance = 0.5 * (cov + cov.transpose());

    const double ssr = residuals.squaredNorm();
    const double sst = (response.array() - response.mean()).square().sum();
    report.r_squared = sst > 0.0 ? 1.0 - ssr / sst : (ssr == 0.0 ? 1.0 : 0.0);
    return report;
}

TestResult wald_restriction(const EstimateReport& report, const Eigen::VectorXd& r,
                            const std::string& name) {
    if (r.size() != report.coefficients.size())
        throw std::invalid_argument("wald_restriction: restriction length mismatch");
    const double estimate = r.dot(report.coefficients);
    const double variance = r.dot(report.robust_covariance * r);
    // Restrictions satisfied up to solver round-off count as exactly met;
    // otherwise an exact-fit model (variance ~ 0) would turn noise into a
    // huge F statistic.
    const double scale = 1.0 + report.coefficients.norm() * r.norm();
    if (std::abs(estimate) <= 1e-12 * scale) return {name, 0.0, 1.0};
    if (!(variance > 0.0))
        throw std::domain_error("wald_restriction: degenerate restriction covariance");

    const double f = estimate * estimate / variance;
    const double dof2 =
        static_cast<double>(report.n_obs - report.coefficients.size());
    const boost::math::fisher_f dist(1.0, dof2);
    return {name, f, boost::math::cdf(boost::math::complement(dist, f))};
}

}  // namespace ammlab
