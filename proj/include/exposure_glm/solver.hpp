#pragma once

// IRLS (Fisher scoring) for the weighted log-link Tweedie regression, plus the
// closed-form estimator of an intercept-only model.

#include <exposure_glm/model.hpp>

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace exposure_glm {

enum class InitMode { HomogeneousIntercept, Zeros, UserVector };

struct FitConfig {
    /// Stop when max_j |(X' D R)_j| falls below this (the gradient scaled by phi).
    double tolerance = 1e-8;
    int max_iterations = 100;
    InitMode init = InitMode::HomogeneousIntercept;
    Eigen::VectorXd user_beta;  // used only with InitMode::UserVector
    /// Halve the step while the quasi-log-likelihood decreases. Off by default.
    bool step_halving = false;

    void validate() const;
};

struct IterationRecord {
    int iteration = 0;
    Eigen::VectorXd beta;
    double objective = 0.0;
    double gradient_norm = 0.0;
};

struct FitResult {
    WeightScheme scheme = WeightScheme::Ratio;
    Eigen::VectorXd beta_hat;
    /// phi (X' D X)^-1 at beta_hat.
    Eigen::MatrixXd covariance;
    int iterations = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    double objective = 0.0;
    std::size_t num_observations = 0;
    std::vector<IterationRecord> trace;  // trace[0] is the starting point
};

/// Closed-form MLE of the common annual premium: sum w_i z_i / sum w_i.
double homogeneous_mle(const Portfolio& portfolio, WeightScheme scheme, const TweedieFamily& family);

/// Starting coefficients. HomogeneousIntercept gives (log homogeneous_mle, 0, ..., 0)
/// and throws InitializationError when every loss is zero.
Eigen::VectorXd init_beta(const Portfolio& portfolio, WeightScheme scheme,
                          const TweedieFamily& family, const FitConfig& config);

/// beta + delta with (X' D X) delta = X' D R. Throws FactorizationError when
/// X' D X is not SPD.
Eigen::VectorXd irls_step(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                          WeightScheme scheme, const TweedieFamily& family);

/// Fits beta for one weight scheme. Non-convergence is reported through
/// FitResult::converged; a singular information matrix throws.
FitResult fit(const Portfolio& portfolio, WeightScheme scheme, const TweedieFamily& family,
              const FitConfig& config = {});

// Problem-level entry points, shared with the claim-count models and the
// offset (y, log t) formulation.

/// log( sum w y e^{(1-p) o} / sum w e^{(2-p) o} ), the intercept-only optimum.
double homogeneous_intercept(const WeightedProblem& problem);

Eigen::VectorXd irls_step(const WeightedProblem& problem, const Eigen::VectorXd& beta);

/// `scheme` is only recorded in the result. `phi` scales the reported covariance.
FitResult fit_problem(const WeightedProblem& problem, const Eigen::VectorXd& start, double phi,
                      const FitConfig& config, WeightScheme scheme = WeightScheme::Ratio);

/// phi (X' D X)^-1 for a portfolio and scheme at beta.
Eigen::MatrixXd asymptotic_covariance(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                                      WeightScheme scheme, const TweedieFamily& family);

}  // namespace exposure_glm
