#pragma once

// Claim-count counterparts of the exposure question. For Poisson counts the
// offset and ratio likelihoods are proportional in beta, so the fits coincide;
// with zero inflation they are not, and the difference of the two
// log-likelihoods varies with beta.

#include <exposure_glm/model.hpp>
#include <exposure_glm/solver.hpp>

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace exposure_glm {

struct CountObservation {
    std::string contract_id;
    double exposure = 1.0;
    int count = 0;
    std::vector<double> covariates;
};

class CountData {
public:
    explicit CountData(std::vector<CountObservation> observations,
                       std::vector<std::string> covariate_names = {});

    std::size_t size() const noexcept { return observations_.size(); }
    std::size_t num_coefficients() const noexcept { return static_cast<std::size_t>(design_.cols()); }
    const std::vector<CountObservation>& observations() const noexcept { return observations_; }
    const Eigen::MatrixXd& design() const noexcept { return design_; }
    const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

    Eigen::VectorXd exposures() const;
    Eigen::VectorXd counts() const;
    bool all_full_exposure() const;

private:
    std::vector<CountObservation> observations_;
    std::vector<std::string> covariate_names_;
    Eigen::MatrixXd design_;
};

struct ZipParams {
    double zero_inflation = 0.0;  // extra mass at zero, [0, 1)
    Eigen::VectorXd beta;

    void validate() const;
};

/// Poisson problem: offset mode is (y, w = 1, log t); ratio mode is (z = y / t, w = t).
WeightedProblem make_poisson_problem(const CountData& data, WeightScheme mode);

/// Poisson IRLS with log link. Throws InitializationError when all counts are zero.
FitResult poisson_fit(const CountData& data, WeightScheme mode, const FitConfig& config = {});

/// Zero-inflated Poisson log-likelihood with factorial terms dropped.
/// Offset mode: sum_i log(pi I(y_i = 0) + (1 - pi) Pois(y_i; t_i e^{x_i'beta})).
/// Ratio mode:  sum_i t_i log(pi I(z_i = 0) + (1 - pi) Pois(z_i; e^{x_i'beta})).
double zip_loglik(const ZipParams& params, const CountData& data, WeightScheme mode);

/// Analytic derivative of zip_loglik with respect to beta.
Eigen::VectorXd zip_gradient(const ZipParams& params, const CountData& data, WeightScheme mode);

struct NonEquivalenceReport {
    std::vector<Eigen::VectorXd> probes;
    std::vector<double> differences;  // offset minus ratio log-likelihood at each probe
    double spread = 0.0;              // max - min of the differences
    bool all_full_exposure = false;
    bool non_equivalent = false;
};

/// Evaluates both ZIP log-likelihoods at 1 + 2k probe points around the
/// intercept-only Poisson estimate (each coefficient moved by +-0.5) and flags
/// the modes as non-equivalent when the difference moves by more than
/// `threshold`. Data with every exposure equal to 1 is reported as equivalent.
NonEquivalenceReport zip_nonequivalence_check(const CountData& data, double zero_inflation,
                                              double threshold = 1e-6);

}  // namespace exposure_glm
