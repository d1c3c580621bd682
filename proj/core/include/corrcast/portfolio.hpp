#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace corrcast {

// Symmetric N x N covariance of daily returns, labeled by asset.
struct CovarianceMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd entries;

    Eigen::Index size() const { return entries.rows(); }
};

// Fully invested risky weights plus the cash leg w_I held at the risk-free
// rate; weights + cash sum to 1.
struct WeightVector {
    std::vector<std::string> labels;
    Eigen::VectorXd weights;
    double cash = 0.0;
};

struct ScaledWeights {
    double stock = 0.0;
    double bond = 0.0;
    double cash = 0.0;
};

// Minimum-variance stock weight for a stock/bond pair,
// w = (sigma_b^2 - rho sigma_s sigma_b) / (sigma_s^2 + sigma_b^2 - 2 rho
// sigma_s sigma_b); the bond leg gets 1 - w. Unbounded, shorting permitted.
// Throws DegenerateInputError when the denominator is below 1e-15 in
// magnitude, DomainError on invalid sigma or rho.
double two_asset_weight(double sigma_s, double sigma_b, double rho);

// Closed-form minimum-variance weights inv(Sigma) 1 / (1' inv(Sigma) 1)
// after ridge repair (lambda = max(0, 1e-10 - min eigenvalue) added to the
// diagonal). Throws ConditioningError when the repaired matrix still cannot
// be solved, ValidationError on a malformed matrix.
WeightVector n_asset_weights(const CovarianceMatrix& cov);

// Sigma_ij = rho_ij sigma_i sigma_j from per-asset volatilities and pairwise
// predicted correlations (either key order accepted); indefinite results are
// repaired by clipping negative eigenvalues at 0 and re-symmetrizing.
// Already-PSD inputs pass through untouched. Throws GapError listing missing
// pairs, DomainError on out-of-range inputs.
CovarianceMatrix assemble_covariance(
    const std::vector<std::pair<std::string, double>>& vols,
    const std::map<std::pair<std::string, std::string>, double>& corr);

// sqrt(w' Sigma w), same time unit as the covariance.
double portfolio_volatility(const CovarianceMatrix& cov,
                            const Eigen::VectorXd& weights);

// Volatility targeting: k = min(1, target_vol / portfolio_vol) (k = 1 when
// portfolio_vol is 0), scaled weights k*w, cash w_I = 1 - sum. Throws
// DomainError on negative target or volatility.
ScaledWeights scale_weights(double w_s, double w_b, double target_vol,
                            double portfolio_vol);
Eigen::VectorXd scale_weight_vector(const Eigen::VectorXd& weights,
                                    double target_vol, double portfolio_vol,
                                    double& cash_out);

} // namespace corrcast
