#pragma once

// Premiums and the asymptotic comparison of offset vs ratio premium estimators.
//
// Under asymptotic normality beta_hat ~ N(beta, Sigma) with
// Sigma = phi (X' D X)^-1, the annual premium estimator exp(x' beta_hat) is
// lognormal, which gives closed-form moments. Because D^O - D^R is a positive
// diagonal matrix whenever some exposure is below one, Sigma_R - Sigma_O is
// positive definite and both moments are strictly larger under the ratio
// scheme.

#include <exposure_glm/model.hpp>

#include <Eigen/Dense>

#include <string>

namespace exposure_glm {

struct PremiumQuote {
    std::string contract_id;
    double annualized = 0.0;       // exp(x' beta)
    double exposure_scaled = 0.0;  // t * annualized
};

/// Requires t in (0, 1].
PremiumQuote premium(const Eigen::VectorXd& beta, const Eigen::VectorXd& x, double t,
                     std::string contract_id = {});

/// Whether moments are evaluated at a known data-generating beta (simulation
/// studies) or at a fitted beta (plug-in diagnostics).
enum class MomentBasis { TrueCoefficients, PlugIn };

struct EstimatorMoments {
    double mean = 0.0;
    double variance = 0.0;
    WeightScheme scheme = WeightScheme::Ratio;
    MomentBasis basis = MomentBasis::TrueCoefficients;
};

/// Lognormal moments of exp(x' beta_hat) with beta_hat ~ N(beta, covariance):
///   mean = exp(x' beta + s / 2), variance = (exp(s) - 1) mean^2, s = x' covariance x.
/// `covariance` must already include the dispersion factor phi. It must be
/// symmetric positive semi-definite (the zero matrix is accepted).
EstimatorMoments premium_moments(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                                 const Eigen::MatrixXd& covariance, WeightScheme scheme,
                                 MomentBasis basis = MomentBasis::TrueCoefficients);

enum class Dominance { StrictlyDominant, DegenerateEqual, Indefinite };

std::string_view to_string(Dominance verdict);

struct DominanceResult {
    Dominance verdict = Dominance::Indefinite;
    Eigen::MatrixXd difference;  // M = Cov_R - Cov_O
    Eigen::MatrixXd covariance_offset;
    Eigen::MatrixXd covariance_ratio;
};

/// Compares Cov_R and Cov_O at beta through a Cholesky factorization of M.
DominanceResult covariance_dominance(const Portfolio& portfolio, const Eigen::VectorXd& beta,
                                     const TweedieFamily& family);

struct MomentOrdering {
    EstimatorMoments offset;
    EstimatorMoments ratio;
    bool all_full_exposure = false;
    bool mean_ordered = false;      // strict E_O < E_R, or equality when all t = 1
    bool variance_ordered = false;  // same for the variances
    bool holds() const noexcept { return mean_ordered && variance_ordered; }
};

/// Both schemes' premium moments for a contract with covariate row x
/// (including the leading 1), at coefficient vector beta.
MomentOrdering moment_ordering(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                               const Portfolio& portfolio, const TweedieFamily& family,
                               MomentBasis basis = MomentBasis::TrueCoefficients);

/// sum_i t_i (zeta_i - E[zeta_hat_i]) with zeta_i = exp(x_i' beta) and the
/// moments taken under `scheme`. Non-positive when phi > 0. The ratio value
/// never exceeds the offset value.
double expected_random_gap(const Portfolio& portfolio, const Eigen::VectorXd& beta,
                           const TweedieFamily& family, WeightScheme scheme);

}  // namespace exposure_glm
