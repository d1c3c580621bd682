#include "corrcast/portfolio.hpp"

#include <cmath>

#include "corrcast/csv.hpp"
#include "corrcast/errors.hpp"

namespace corrcast {

double two_asset_weight(double sigma_s, double sigma_b, double rho) {
    if (!(sigma_s >= 0.0) || !(sigma_b >= 0.0))
        throw DomainError("two_asset_weight: volatilities must be nonnegative");
    if (!(rho >= -1.0 && rho <= 1.0))
        throw DomainError("two_asset_weight: rho " + csv::format_double(rho) +
                          " outside [-1, 1]");
    const double cross = rho * sigma_s * sigma_b;
    const double denom = sigma_s * sigma_s + sigma_b * sigma_b - 2.0 * cross;
    if (std::abs(denom) <= 1e-15)
        throw DegenerateInputError(
            "two_asset_weight: degenerate denominator (sigma_s = sigma_b and "
            "rho = 1)");
    return (sigma_b * sigma_b - cross) / denom;
}

namespace {

void check_square(const CovarianceMatrix& cov, const char* op) {
    if (cov.entries.rows() != cov.entries.cols())
        throw ValidationError(std::string(op) + ": matrix is not square");
    if (cov.entries.rows() == 0)
        throw ValidationError(std::string(op) + ": matrix is empty");
    if (!cov.labels.empty() &&
        static_cast<Eigen::Index>(cov.labels.size()) != cov.entries.rows())
        throw ValidationError(std::string(op) + ": label count " +
                              std::to_string(cov.labels.size()) +
                              " does not match dimension " +
                              std::to_string(cov.entries.rows()));
}

} // namespace

WeightVector n_asset_weights(const CovarianceMatrix& cov) {
    check_square(cov, "n_asset_weights");
    const Eigen::Index n = cov.entries.rows();
    const double scale = cov.entries.cwiseAbs().maxCoeff();
    if (!((cov.entries - cov.entries.transpose()).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(scale, 1.0)))
        throw ValidationError("n_asset_weights: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov.entries);
    if (eigen.info() != Eigen::Success)
        throw ConditioningError("n_asset_weights: eigendecomposition failed");
    const double min_eig = eigen.eigenvalues().minCoeff();
    const double ridge = std::max(0.0, 1e-10 - min_eig);

    Eigen::MatrixXd repaired = cov.entries;
    if (ridge > 0.0) repaired.diagonal().array() += ridge;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(repaired);
    if (ldlt.info() != Eigen::Success)
        throw ConditioningError("n_asset_weights: factorization failed");
    const Eigen::VectorXd solved = ldlt.solve(Eigen::VectorXd::Ones(n));
    const double denom = solved.sum();
    if (!std::isfinite(denom) || std::abs(denom) <= 1e-300)
        throw ConditioningError("n_asset_weights: matrix singular beyond repair");

    WeightVector out;
    out.labels = cov.labels;
    out.weights = solved / denom;
    out.cash = 0.0;
    return out;
}

CovarianceMatrix assemble_covariance(
    const std::vector<std::pair<std::string, double>>& vols,
    const std::map<std::pair<std::string, std::string>, double>& corr) {
    const auto n = static_cast<Eigen::Index>(vols.size());
    if (n == 0) throw ValidationError("assemble_covariance: no assets");

    CovarianceMatrix cov;
    cov.entries.resize(n, n);
    for (const auto& [label, sigma] : vols) {
        if (!(sigma >= 0.0))
            throw DomainError("assemble_covariance: negative volatility for " +
                              label);
        cov.labels.push_back(label);
    }

    std::string missing;
    for (Eigen::Index i = 0; i < n; ++i) {
        cov.entries(i, i) = vols[static_cast<size_t>(i)].second *
                            vols[static_cast<size_t>(i)].second;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const std::string& a = cov.labels[static_cast<size_t>(i)];
            const std::string& b = cov.labels[static_cast<size_t>(j)];
            auto it = corr.find({a, b});
            if (it == corr.end()) it = corr.find({b, a});
            if (it == corr.end()) {
                missing += (missing.empty() ? "" : ", ");
                missing += "(" + a + ", " + b + ")";
                continue;
            }
            const double rho = it->second;
            if (!(rho >= -1.0 && rho <= 1.0))
                throw DomainError("assemble_covariance: rho " +
                                  csv::format_double(rho) + " for (" + a + ", " +
                                  b + ") outside [-1, 1]");
            const double value = rho * vols[static_cast<size_t>(i)].second *
                                 vols[static_cast<size_t>(j)].second;
            cov.entries(i, j) = value;
            cov.entries(j, i) = value;
        }
    }
    if (!missing.empty())
        throw GapError("assemble_covariance: missing correlation pairs: " +
                       missing);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov.entries);
    if (eigen.info() != Eigen::Success)
        throw ConditioningError("assemble_covariance: eigendecomposition failed");
    if (eigen.eigenvalues().minCoeff() < 0.0) {
        const Eigen::VectorXd clipped = eigen.eigenvalues().cwiseMax(0.0);
        const Eigen::MatrixXd rebuilt = eigen.eigenvectors() *
                                        clipped.asDiagonal() *
                                        eigen.eigenvectors().transpose();
        cov.entries = 0.5 * (rebuilt + rebuilt.transpose());
    }
    return cov;
}

double portfolio_volatility(const CovarianceMatrix& cov,
                            const Eigen::VectorXd& weights) {
    check_square(cov, "portfolio_volatility");
    if (weights.size() != cov.entries.rows())
        throw ValidationError("portfolio_volatility: weight count " +
                              std::to_string(weights.size()) +
                              " does not match dimension " +
                              std::to_string(cov.entries.rows()));
    const double variance = weights.dot(cov.entries * weights);
    return std::sqrt(std::max(variance, 0.0));
}

Eigen::VectorXd scale_weight_vector(const Eigen::VectorXd& weights,
                                    double target_vol, double portfolio_vol,
                                    double& cash_out) {
    if (!(target_vol >= 0.0))
        throw DomainError("scale_weights: negative target volatility");
    if (!(portfolio_vol >= 0.0))
        throw DomainError("scale_weights: negative portfolio volatility");
    const double k =
        portfolio_vol > 0.0 ? std::min(1.0, target_vol / portfolio_vol) : 1.0;
    Eigen::VectorXd scaled = k * weights;
    cash_out = 1.0 - scaled.sum();
    return scaled;
}

ScaledWeights scale_weights(double w_s, double w_b, double target_vol,
                            double portfolio_vol) {
    Eigen::VectorXd w(2);
    w << w_s, w_b;
    ScaledWeights out;
    const Eigen::VectorXd scaled =
        scale_weight_vector(w, target_vol, portfolio_vol, out.cash);
    out.stock = scaled(0);
    out.bond = scaled(1);
    return out;
}

} // namespace corrcast
