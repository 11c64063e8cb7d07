#pragma once

// Independent numerical oracles used by the test suites. None of these call
// into the IRLS or the analytic gradient/information kernels.

#include <exposure_glm/errors.hpp>

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace exposure_glm::verification {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Step for coordinate j given its current value.
using StepRule = std::function<double(double)>;

/// 1e-6 * max(1, |beta_j|).
double default_step(double beta_j);

/// Central differences per coordinate. Throws NonFiniteError if any objective
/// evaluation is not finite.
Eigen::VectorXd finite_diff_gradient(const Objective& objective, const Eigen::VectorXd& beta,
                                     const StepRule& step = default_step);

struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    int steps = 3;  // lattice points including both ends
};

struct GridSpec {
    std::vector<GridAxis> axes;  // at most two

    void validate() const;
};

struct GridResult {
    Eigen::VectorXd argmax;
    double value = 0.0;
    bool on_boundary = false;  // coarse winner sat on the edge of the lattice
};

/// Lattice argmax followed by one refinement pass on the box of +-1 cell
/// around the winner, using the same number of points per axis. Ties go to
/// the lowest lexicographic index.
GridResult grid_mle(const Objective& objective, const GridSpec& spec);

/// Smallest eigenvalue of a symmetric matrix. Inputs with
/// max|M - M'| < 1e-10 are symmetrized; larger asymmetry throws DomainError.
double eig_min(const Eigen::MatrixXd& matrix);

}  // namespace exposure_glm::verification
