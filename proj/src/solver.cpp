#include <exposure_glm/solver.hpp>

#include <cmath>
#include <sstream>

namespace exposure_glm {

namespace {

double sup_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& m) {
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("information matrix X'DX is not positive definite");
    }
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
    return 0.5 * (inv + inv.transpose());
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

void FitConfig::validate() const {
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
    if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
}

double homogeneous_mle(const Portfolio& portfolio, WeightScheme scheme, const TweedieFamily& family) {
    if (portfolio.size() == 0) throw EmptyInputError("portfolio has no contracts");
    double num = 0.0;
    double den = 0.0;
    for (const auto& obs : portfolio.observations()) {
        const double w = weight(scheme, obs.exposure, family.power());
        num += w * normalize(obs);
        den += w;
    }
    return num / den;
}

double homogeneous_intercept(const WeightedProblem& problem) {
    validate(problem);
    if (problem.size() == 0) throw EmptyInputError("problem has no rows");
    const double p = problem.power;
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < problem.response.rows(); ++i) {
        const double o = problem.log_offset(i);
        num += problem.weights(i) * problem.response(i) * std::exp((1.0 - p) * o);
        den += problem.weights(i) * std::exp((2.0 - p) * o);
    }
    if (!(num > 0.0)) {
        throw InitializationError("all responses are zero; the intercept-only estimate is log(0)");
    }
    return std::log(num / den);
}

Eigen::VectorXd init_beta(const Portfolio& portfolio, WeightScheme scheme,
                          const TweedieFamily& family, const FitConfig& config) {
    const auto k = static_cast<Eigen::Index>(portfolio.num_coefficients());
    switch (config.init) {
        case InitMode::Zeros: return Eigen::VectorXd::Zero(k);
        case InitMode::UserVector:
            if (config.user_beta.size() != k) {
                throw DimensionError("user starting vector has length " +
                                     std::to_string(config.user_beta.size()) + ", expected " +
                                     std::to_string(k));
            }
            return config.user_beta;
        case InitMode::HomogeneousIntercept: {
            const double zeta = homogeneous_mle(portfolio, scheme, family);
            if (!(zeta > 0.0)) {
                throw InitializationError(
                    "all loss costs are zero; cannot initialize the intercept at log(0)");
            }
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
            beta(0) = std::log(zeta);
            return beta;
        }
    }
    throw DomainError("unknown initialization mode");
}

Eigen::VectorXd irls_step(const WeightedProblem& problem, const Eigen::VectorXd& beta) {
    const Eigen::MatrixXd info = unscaled_information(problem, beta);
    const Eigen::VectorXd score = unscaled_score(problem, beta);
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("information matrix X'DX is not positive definite");
    }
    return beta + llt.solve(score);
}

Eigen::VectorXd irls_step(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                          WeightScheme scheme, const TweedieFamily& family) {
    return irls_step(make_problem(portfolio, scheme, family), beta);
}

FitResult fit_problem(const WeightedProblem& problem, const Eigen::VectorXd& start, double phi,
                      const FitConfig& config, WeightScheme scheme) {
    config.validate();
    validate(problem);
    if (!(phi > 0.0)) throw DomainError("dispersion must be positive");

    FitResult result;
    result.scheme = scheme;
    result.num_observations = problem.size();

    Eigen::VectorXd beta = start;
    double objective = quasi_loglik(problem, beta);
    Eigen::VectorXd score = unscaled_score(problem, beta);
    if (!std::isfinite(objective) || !all_finite(score)) {
        throw NonFiniteError("objective is not finite at the starting point");
    }
    double gnorm = sup_norm(score);
    result.trace.push_back({0, beta, objective, gnorm});

    int it = 0;
    while (gnorm >= config.tolerance && it < config.max_iterations) {
        const Eigen::MatrixXd info = unscaled_information(problem, beta);
        const Eigen::LLT<Eigen::MatrixXd> llt(info);
        if (llt.info() != Eigen::Success) {
            throw FactorizationError("information matrix X'DX is not positive definite at iteration " +
                                     std::to_string(it + 1));
        }
        Eigen::VectorXd step = llt.solve(score);
        Eigen::VectorXd candidate = beta + step;
        double cand_obj = quasi_loglik(problem, candidate);

        if (config.step_halving) {
            for (int h = 0; h < 40 && !(std::isfinite(cand_obj) && cand_obj >= objective); ++h) {
                step *= 0.5;
                candidate = beta + step;
                cand_obj = quasi_loglik(problem, candidate);
            }
        }
        Eigen::VectorXd cand_score = unscaled_score(problem, candidate);
        if (!std::isfinite(cand_obj) || !all_finite(cand_score)) break;

        ++it;
        beta = std::move(candidate);
        objective = cand_obj;
        score = std::move(cand_score);
        gnorm = sup_norm(score);
        result.trace.push_back({it, beta, objective, gnorm});
    }

    result.beta_hat = beta;
    result.iterations = it;
    result.gradient_norm = gnorm;
    result.objective = objective / phi;
    result.converged = gnorm < config.tolerance;
    result.covariance = phi * spd_inverse(unscaled_information(problem, beta));
    return result;
}

FitResult fit(const Portfolio& portfolio, WeightScheme scheme, const TweedieFamily& family,
              const FitConfig& config) {
    config.validate();
    const Eigen::VectorXd start = init_beta(portfolio, scheme, family, config);
    if (portfolio.losses().sum() == 0.0) {
        throw InitializationError("all loss costs are zero; nothing to fit");
    }
    return fit_problem(make_problem(portfolio, scheme, family), start, family.dispersion(), config,
                       scheme);
}

Eigen::MatrixXd asymptotic_covariance(const Eigen::VectorXd& beta, const Portfolio& portfolio,
                                      WeightScheme scheme, const TweedieFamily& family) {
    return family.dispersion() * spd_inverse(unscaled_information(make_problem(portfolio, scheme, family), beta));
}

}  // namespace exposure_glm
