#pragma once

// Tweedie family, portfolio data and the quasi-likelihood kernels shared by
// the offset and ratio treatments of partial-year exposure.
//
// Both treatments reduce to a weighted Tweedie regression on the annualized
// loss z = y / t with a log link; they differ only in the per-contract weight
// (t^(2-p) for offset, t for ratio). The normalizing term a(y, w, phi) of the
// density does not depend on the coefficients and is never evaluated, so every
// objective value reported here is a quasi-log-likelihood.

#include <exposure_glm/errors.hpp>

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace exposure_glm {

/// Tweedie exponential-dispersion family with variance power p in (1, 2).
class TweedieFamily {
public:
    explicit TweedieFamily(double power, double dispersion = 1.0);

    double power() const noexcept { return power_; }
    double dispersion() const noexcept { return dispersion_; }

    /// theta = mu^(1-p) / (1-p).
    double canonical_parameter(double mean) const;

private:
    double power_;
    double dispersion_;
};

struct Observation {
    std::string contract_id;
    double exposure = 1.0;   // fraction of a year, (0, 1]
    double loss_cost = 0.0;  // >= 0, exact zeros allowed
    std::vector<double> covariates;
};

/// Throws DomainError if exposure is outside (0, 1], the loss is negative, or
/// any value is non-finite.
void validate(const Observation& obs);

/// Validated contracts plus the design matrix [1, x_1, ..., x_q].
///
/// Construction checks every observation, requires n >= q + 1 and a design
/// of full column rank. Immutable afterwards.
class Portfolio {
public:
    explicit Portfolio(std::vector<Observation> observations,
                       std::vector<std::string> covariate_names = {});

    std::size_t size() const noexcept { return observations_.size(); }
    std::size_t num_covariates() const noexcept { return covariate_names_.size(); }
    std::size_t num_coefficients() const noexcept { return covariate_names_.size() + 1; }

    const std::vector<Observation>& observations() const noexcept { return observations_; }
    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

    /// "(intercept)" followed by the covariate names.
    std::vector<std::string> column_names() const;

    Eigen::VectorXd exposures() const;
    Eigen::VectorXd losses() const;
    Eigen::VectorXd normalized_losses() const;

    bool all_full_exposure() const;

private:
    std::vector<Observation> observations_;
    std::vector<std::string> covariate_names_;
    Eigen::MatrixXd design_;
};

/// Throws RankDeficientError naming the columns of the first linear
/// dependency found, scanning columns left to right.
void require_full_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& names);

enum class WeightScheme { Offset, Ratio };

std::string_view to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view text);

inline constexpr WeightScheme kBothSchemes[] = {WeightScheme::Offset, WeightScheme::Ratio};

/// Parameters (mu, w, phi, p) of a single Tweedie law.
struct TweedieParams {
    TweedieParams(double mean, double weight, TweedieFamily family);

    double mean;
    double weight;
    TweedieFamily family;
};

/// Annualized loss z = y / t.
double normalize(const Observation& obs);

/// Offset: t^(2-p). Ratio: t. Requires t in (0, 1] and p in (1, 2).
double weight(WeightScheme scheme, double exposure, double power);

/// Law of t * Z when Z ~ params: (t mu, w / t^(2-p), phi, p).
TweedieParams scale_params(const TweedieParams& params, double t);

/// A weighted log-link regression with power-variance kernel:
///   mu_i = exp(x_i' beta + log_offset_i),
///   objective = (1/phi) sum_i w_i (mu_i^(1-p) y_i / (1-p) - mu_i^(2-p) / (2-p)).
/// power == 1 is accepted and gives the Poisson kernel sum_i w_i (y_i log mu_i - mu_i).
struct WeightedProblem {
    Eigen::MatrixXd design;
    Eigen::VectorXd response;
    Eigen::VectorXd weights;
    Eigen::VectorXd log_offset;
    double power = 1.5;

    std::size_t size() const noexcept { return static_cast<std::size_t>(response.size()); }
    std::size_t num_coefficients() const noexcept { return static_cast<std::size_t>(design.cols()); }
};

/// Checks shapes, positive weights, non-negative responses and power in [1, 2).
void validate(const WeightedProblem& problem);

/// Annualized losses weighted by the scheme; no offset.
WeightedProblem make_problem(const Portfolio& portfolio, WeightScheme scheme,
                             const TweedieFamily& family);

/// Raw losses y with unit weights and log t as offset.
WeightedProblem make_offset_formulation(const Portfolio& portfolio, const TweedieFamily& family);

Eigen::VectorXd linear_predictor(const WeightedProblem& problem, const Eigen::VectorXd& beta);
double quasi_loglik(const WeightedProblem& problem, const Eigen::VectorXd& beta, double phi = 1.0);
/// Diagonal of D: w_i mu_i^(2-p).
Eigen::VectorXd working_weights(const WeightedProblem& problem, const Eigen::VectorXd& beta);
/// Unscaled score X' D R with R_i = y_i / mu_i - 1.
Eigen::VectorXd unscaled_score(const WeightedProblem& problem, const Eigen::VectorXd& beta);
/// Unscaled information X' D X (no factorization check).
Eigen::MatrixXd unscaled_information(const WeightedProblem& problem, const Eigen::VectorXd& beta);

double quasi_loglik(const Eigen::VectorXd& beta, const Portfolio& portfolio, WeightScheme scheme,
                    const TweedieFamily& family);
/// (1/phi) X' D R.
Eigen::VectorXd gradient(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                         WeightScheme scheme, const TweedieFamily& family);
/// Entry i is w_i exp((2-p) x_i' beta).
Eigen::VectorXd d_matrix(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                         WeightScheme scheme, const TweedieFamily& family);
/// (1/phi) X' D X. Throws FactorizationError if it is not numerically SPD.
Eigen::MatrixXd fisher_info(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                            WeightScheme scheme, const TweedieFamily& family);

}  // namespace exposure_glm
