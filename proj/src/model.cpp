#include <exposure_glm/model.hpp>

#include <cmath>
#include <sstream>

namespace exposure_glm {

namespace {

void check_power(double power) {
    if (!(power > 1.0 && power < 2.0)) {
        std::ostringstream msg;
        msg << "variance power must lie in (1, 2), got " << power;
        throw DomainError(msg.str());
    }
}

void check_exposure(double t) {
    if (!(t > 0.0 && t <= 1.0)) {
        std::ostringstream msg;
        msg << "exposure must lie in (0, 1], got " << t;
        throw DomainError(msg.str());
    }
}

void check_beta(const Eigen::VectorXd& beta, std::size_t expected) {
    if (static_cast<std::size_t>(beta.size()) != expected) {
        std::ostringstream msg;
        msg << "coefficient vector has length " << beta.size() << ", expected " << expected;
        throw DimensionError(msg.str());
    }
}

}  // namespace

TweedieFamily::TweedieFamily(double power, double dispersion)
    : power_(power), dispersion_(dispersion) {
    check_power(power);
    if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw DomainError("dispersion must be positive and finite");
    }
}

double TweedieFamily::canonical_parameter(double mean) const {
    if (!(mean > 0.0)) throw DomainError("mean must be positive");
    return std::pow(mean, 1.0 - power_) / (1.0 - power_);
}

void validate(const Observation& obs) {
    const auto where = [&] { return " (contract '" + obs.contract_id + "')"; };
    if (!std::isfinite(obs.exposure) || !(obs.exposure > 0.0 && obs.exposure <= 1.0)) {
        throw DomainError("exposure must lie in (0, 1]" + where());
    }
    if (!std::isfinite(obs.loss_cost) || obs.loss_cost < 0.0) {
        throw DomainError("loss cost must be finite and non-negative" + where());
    }
    for (double x : obs.covariates) {
        if (!std::isfinite(x)) throw DomainError("covariate is not finite" + where());
    }
}

void require_full_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& names) {
    const Eigen::Index cols = design.cols();
    const auto name_of = [&](Eigen::Index j) {
        return static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                           : "column " + std::to_string(j);
    };
    if (design.rows() < cols) {
        std::ostringstream msg;
        msg << "need at least " << cols << " contracts for " << cols << " coefficients, got "
            << design.rows();
        std::vector<std::string> all;
        for (Eigen::Index j = 0; j < cols; ++j) all.push_back(name_of(j));
        throw RankDeficientError(msg.str(), all);
    }

    const double scale = std::max(1.0, design.cwiseAbs().maxCoeff());
    const double threshold = 1e-10 * scale * std::sqrt(static_cast<double>(design.rows()));

    // Grow an independent column set left to right; the first column that does
    // not increase the rank is reported together with the columns it depends on.
    std::vector<Eigen::Index> basis;
    for (Eigen::Index j = 0; j < cols; ++j) {
        const Eigen::VectorXd col = design.col(j);
        if (basis.empty()) {
            if (col.norm() > threshold) {
                basis.push_back(j);
                continue;
            }
            throw RankDeficientError("design column '" + name_of(j) + "' is identically zero",
                                     {name_of(j)});
        }
        Eigen::MatrixXd sub(design.rows(), static_cast<Eigen::Index>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = design.col(basis[k]);
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        const Eigen::VectorXd coef = qr.solve(col);
        const double residual = (sub * coef - col).norm();
        if (residual > threshold * std::max(1.0, col.norm())) {
            basis.push_back(j);
            continue;
        }
        std::vector<std::string> involved;
        std::ostringstream msg;
        msg << "design matrix is rank deficient: column '" << name_of(j)
            << "' is a linear combination of";
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (std::abs(coef(static_cast<Eigen::Index>(k))) > 1e-8) {
                involved.push_back(name_of(basis[k]));
                msg << " '" << name_of(basis[k]) << "'";
            }
        }
        involved.push_back(name_of(j));
        throw RankDeficientError(msg.str(), involved);
    }
}

Portfolio::Portfolio(std::vector<Observation> observations, std::vector<std::string> covariate_names)
    : observations_(std::move(observations)), covariate_names_(std::move(covariate_names)) {
    if (observations_.empty()) throw EmptyInputError("portfolio has no contracts");

    const std::size_t q = observations_.front().covariates.size();
    if (covariate_names_.empty()) {
        for (std::size_t j = 1; j <= q; ++j) covariate_names_.push_back("x" + std::to_string(j));
    }
    if (covariate_names_.size() != q) {
        throw DimensionError("number of covariate names does not match the covariate vectors");
    }
    for (const auto& obs : observations_) {
        validate(obs);
        if (obs.covariates.size() != q) {
            throw DimensionError("contract '" + obs.contract_id + "' has " +
                                 std::to_string(obs.covariates.size()) + " covariates, expected " +
                                 std::to_string(q));
        }
    }

    const auto n = static_cast<Eigen::Index>(observations_.size());
    design_.resize(n, static_cast<Eigen::Index>(q + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& obs = observations_[static_cast<std::size_t>(i)];
        design_(i, 0) = 1.0;
        for (std::size_t j = 0; j < q; ++j) design_(i, static_cast<Eigen::Index>(j + 1)) = obs.covariates[j];
    }
    require_full_rank(design_, column_names());
}

std::vector<std::string> Portfolio::column_names() const {
    std::vector<std::string> names{"(intercept)"};
    names.insert(names.end(), covariate_names_.begin(), covariate_names_.end());
    return names;
}

Eigen::VectorXd Portfolio::exposures() const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) t(static_cast<Eigen::Index>(i)) = observations_[i].exposure;
    return t;
}

Eigen::VectorXd Portfolio::losses() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) y(static_cast<Eigen::Index>(i)) = observations_[i].loss_cost;
    return y;
}

Eigen::VectorXd Portfolio::normalized_losses() const {
    Eigen::VectorXd z(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) z(static_cast<Eigen::Index>(i)) = normalize(observations_[i]);
    return z;
}

bool Portfolio::all_full_exposure() const {
    for (const auto& obs : observations_) {
        if (obs.exposure != 1.0) return false;
    }
    return true;
}

std::string_view to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::Offset: return "offset";
        case WeightScheme::Ratio: return "ratio";
    }
    return "unknown";
}

WeightScheme parse_weight_scheme(std::string_view text) {
    if (text == "offset") return WeightScheme::Offset;
    if (text == "ratio") return WeightScheme::Ratio;
    throw DomainError("unknown weight scheme '" + std::string(text) + "'");
}

TweedieParams::TweedieParams(double mean_, double weight_, TweedieFamily family_)
    : mean(mean_), weight(weight_), family(family_) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw DomainError("Tweedie mean must be positive");
    if (!(weight > 0.0) || !std::isfinite(weight)) throw DomainError("Tweedie weight must be positive");
}

double normalize(const Observation& obs) { return obs.loss_cost / obs.exposure; }

double weight(WeightScheme scheme, double exposure, double power) {
    check_exposure(exposure);
    check_power(power);
    switch (scheme) {
        case WeightScheme::Offset: return std::pow(exposure, 2.0 - power);
        case WeightScheme::Ratio: return exposure;
    }
    throw DomainError("unknown weight scheme");
}

TweedieParams scale_params(const TweedieParams& params, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("scale factor must be positive");
    const double p = params.family.power();
    return TweedieParams(t * params.mean, params.weight / std::pow(t, 2.0 - p), params.family);
}

void validate(const WeightedProblem& problem) {
    const auto n = problem.design.rows();
    if (problem.response.size() != n || problem.weights.size() != n || problem.log_offset.size() != n) {
        throw DimensionError("weighted problem vectors do not match the design rows");
    }
    if (!(problem.power >= 1.0 && problem.power < 2.0)) {
        throw DomainError("kernel power must lie in [1, 2)");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(problem.weights(i) > 0.0) || !std::isfinite(problem.weights(i))) {
            throw DomainError("weights must be positive and finite");
        }
        if (!(problem.response(i) >= 0.0) || !std::isfinite(problem.response(i))) {
            throw DomainError("responses must be non-negative and finite");
        }
        if (!std::isfinite(problem.log_offset(i))) throw DomainError("offsets must be finite");
    }
}

WeightedProblem make_problem(const Portfolio& portfolio, WeightScheme scheme,
                             const TweedieFamily& family) {
    const auto n = static_cast<Eigen::Index>(portfolio.size());
    WeightedProblem problem;
    problem.design = portfolio.design();
    problem.response = portfolio.normalized_losses();
    problem.weights.resize(n);
    const auto& obs = portfolio.observations();
    for (Eigen::Index i = 0; i < n; ++i) {
        problem.weights(i) = weight(scheme, obs[static_cast<std::size_t>(i)].exposure, family.power());
    }
    problem.log_offset = Eigen::VectorXd::Zero(n);
    problem.power = family.power();
    return problem;
}

WeightedProblem make_offset_formulation(const Portfolio& portfolio, const TweedieFamily& family) {
    const auto n = static_cast<Eigen::Index>(portfolio.size());
    WeightedProblem problem;
    problem.design = portfolio.design();
    problem.response = portfolio.losses();
    problem.weights = Eigen::VectorXd::Ones(n);
    problem.log_offset = portfolio.exposures().array().log().matrix();
    problem.power = family.power();
    return problem;
}

Eigen::VectorXd linear_predictor(const WeightedProblem& problem, const Eigen::VectorXd& beta) {
    check_beta(beta, problem.num_coefficients());
    const auto n = problem.design.rows();
    const auto k = problem.design.cols();
    Eigen::VectorXd eta(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = problem.log_offset(i);
        for (Eigen::Index j = 0; j < k; ++j) s += problem.design(i, j) * beta(j);
        eta(i) = s;
    }
    return eta;
}

double quasi_loglik(const WeightedProblem& problem, const Eigen::VectorXd& beta, double phi) {
    const Eigen::VectorXd eta = linear_predictor(problem, beta);
    const double p = problem.power;
    double total = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double y = problem.response(i);
        double term;
        if (p == 1.0) {
            term = y * eta(i) - std::exp(eta(i));
        } else {
            const double first = y == 0.0 ? 0.0 : std::exp((1.0 - p) * eta(i)) * y / (1.0 - p);
            term = first - std::exp((2.0 - p) * eta(i)) / (2.0 - p);
        }
        total += problem.weights(i) * term;
    }
    return total / phi;
}

Eigen::VectorXd working_weights(const WeightedProblem& problem, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = linear_predictor(problem, beta);
    const double p = problem.power;
    Eigen::VectorXd d(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) d(i) = problem.weights(i) * std::exp((2.0 - p) * eta(i));
    return d;
}

Eigen::VectorXd unscaled_score(const WeightedProblem& problem, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = linear_predictor(problem, beta);
    const double p = problem.power;
    const auto n = problem.design.rows();
    const auto k = problem.design.cols();
    Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double mu = std::exp(eta(i));
        const double d = problem.weights(i) * std::exp((2.0 - p) * eta(i));
        const double dr = d * (problem.response(i) / mu - 1.0);
        for (Eigen::Index j = 0; j < k; ++j) score(j) += problem.design(i, j) * dr;
    }
    return score;
}

Eigen::MatrixXd unscaled_information(const WeightedProblem& problem, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd d = working_weights(problem, beta);
    const auto n = problem.design.rows();
    const auto k = problem.design.cols();
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index a = 0; a < k; ++a) {
            const double da = d(i) * problem.design(i, a);
            for (Eigen::Index b = 0; b <= a; ++b) info(a, b) += da * problem.design(i, b);
        }
    }
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < a; ++b) info(b, a) = info(a, b);
    }
    return info;
}

double quasi_loglik(const Eigen::VectorXd& beta, const Portfolio& portfolio, WeightScheme scheme,
                    const TweedieFamily& family) {
    return quasi_loglik(make_problem(portfolio, scheme, family), beta, family.dispersion());
}

Eigen::VectorXd gradient(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                         WeightScheme scheme, const TweedieFamily& family) {
    return unscaled_score(make_problem(portfolio, scheme, family), beta) / family.dispersion();
}

Eigen::VectorXd d_matrix(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                         WeightScheme scheme, const TweedieFamily& family) {
    return working_weights(make_problem(portfolio, scheme, family), beta);
}

Eigen::MatrixXd fisher_info(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                            WeightScheme scheme, const TweedieFamily& family) {
    Eigen::MatrixXd info =
        unscaled_information(make_problem(portfolio, scheme, family), beta) / family.dispersion();
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("Fisher information is not positive definite");
    }
    return info;
}

}  // namespace exposure_glm
