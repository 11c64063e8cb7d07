#include <exposure_glm/verification.hpp>
#include <exposure_glm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace exposure_glm::verification {

double default_step(double beta_j) { return 1e-6 * std::max(1.0, std::abs(beta_j)); }

Eigen::VectorXd finite_diff_gradient(const Objective& objective, const Eigen::VectorXd& beta,
                                     const StepRule& step) {
    Eigen::VectorXd grad(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double h = step(beta(j));
        Eigen::VectorXd up = beta;
        Eigen::VectorXd down = beta;
        up(j) += h;
        down(j) -= h;
        const double f_up = objective(up);
        const double f_down = objective(down);
        if (!std::isfinite(f_up) || !std::isfinite(f_down)) {
            throw NonFiniteError("objective is not finite near the evaluation point");
        }
        grad(j) = (f_up - f_down) / (up(j) - down(j));
    }
    return grad;
}

void GridSpec::validate() const {
    if (axes.empty() || axes.size() > 2) throw DomainError("grid search supports 1 or 2 dimensions");
    for (const auto& a : axes) {
        if (a.steps < 3) throw DomainError("each grid axis needs at least 3 points");
        if (!(a.lo < a.hi)) throw DomainError("grid axis needs lo < hi");
    }
}

namespace {

struct LatticeWinner {
    std::vector<int> index;
    Eigen::VectorXd point;
    double value = -std::numeric_limits<double>::infinity();
};

LatticeWinner scan(const Objective& objective, const std::vector<GridAxis>& axes) {
    const auto dims = axes.size();
    LatticeWinner best;
    std::vector<int> idx(dims, 0);
    Eigen::VectorXd point(static_cast<Eigen::Index>(dims));
    for (;;) {
        for (std::size_t d = 0; d < dims; ++d) {
            const auto& a = axes[d];
            point(static_cast<Eigen::Index>(d)) = a.lo + (a.hi - a.lo) * idx[d] / (a.steps - 1);
        }
        const double v = objective(point);
        // Strict comparison keeps the first (lowest lexicographic) maximizer.
        if (std::isfinite(v) && v > best.value) {
            best.value = v;
            best.index = idx;
            best.point = point;
        }
        std::size_t d = dims;
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].steps) break;
            idx[d] = 0;
            if (d == 0) return best;
        }
    }
}

}  // namespace

GridResult grid_mle(const Objective& objective, const GridSpec& spec) {
    spec.validate();
    const LatticeWinner coarse = scan(objective, spec.axes);
    if (coarse.index.empty()) throw NonFiniteError("objective is not finite anywhere on the grid");

    GridResult result;
    for (std::size_t d = 0; d < spec.axes.size(); ++d) {
        if (coarse.index[d] == 0 || coarse.index[d] == spec.axes[d].steps - 1) result.on_boundary = true;
    }

    std::vector<GridAxis> fine = spec.axes;
    for (std::size_t d = 0; d < fine.size(); ++d) {
        const auto& a = spec.axes[d];
        const double cell = (a.hi - a.lo) / (a.steps - 1);
        const double center = coarse.point(static_cast<Eigen::Index>(d));
        fine[d].lo = std::max(a.lo, center - cell);
        fine[d].hi = std::min(a.hi, center + cell);
    }
    const LatticeWinner refined = scan(objective, fine);
    if (!refined.index.empty() && refined.value >= coarse.value) {
        result.argmax = refined.point;
        result.value = refined.value;
    } else {
        result.argmax = coarse.point;
        result.value = coarse.value;
    }
    return result;
}

double eig_min(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols()) throw DimensionError("eig_min needs a square matrix");
    if (matrix.size() == 0) throw EmptyInputError("eig_min needs a non-empty matrix");
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() >= 1e-10) {
        throw DomainError("matrix is not symmetric");
    }
    const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw FactorizationError("eigenvalue iteration failed");
    return solver.eigenvalues().minCoeff();
}

}  // namespace exposure_glm::verification
