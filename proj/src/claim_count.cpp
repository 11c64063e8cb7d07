#include <exposure_glm/claim_count.hpp>

#include <algorithm>
#include <cmath>

namespace exposure_glm {

CountData::CountData(std::vector<CountObservation> observations, std::vector<std::string> covariate_names)
    : observations_(std::move(observations)), covariate_names_(std::move(covariate_names)) {
    if (observations_.empty()) throw EmptyInputError("count data has no contracts");
    const std::size_t q = observations_.front().covariates.size();
    if (covariate_names_.empty()) {
        for (std::size_t j = 1; j <= q; ++j) covariate_names_.push_back("x" + std::to_string(j));
    }
    if (covariate_names_.size() != q) throw DimensionError("covariate names do not match covariates");

    design_.resize(static_cast<Eigen::Index>(observations_.size()), static_cast<Eigen::Index>(q + 1));
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& o = observations_[i];
        if (!(o.exposure > 0.0 && o.exposure <= 1.0)) {
            throw DomainError("exposure must lie in (0, 1] (contract '" + o.contract_id + "')");
        }
        if (o.count < 0) throw DomainError("claim count must be non-negative (contract '" + o.contract_id + "')");
        if (o.covariates.size() != q) throw DimensionError("contract '" + o.contract_id + "' has the wrong covariate count");
        const auto row = static_cast<Eigen::Index>(i);
        design_(row, 0) = 1.0;
        for (std::size_t j = 0; j < q; ++j) design_(row, static_cast<Eigen::Index>(j + 1)) = o.covariates[j];
    }
    std::vector<std::string> names{"(intercept)"};
    names.insert(names.end(), covariate_names_.begin(), covariate_names_.end());
    require_full_rank(design_, names);
}

Eigen::VectorXd CountData::exposures() const {
    Eigen::VectorXd t(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) t(static_cast<Eigen::Index>(i)) = observations_[i].exposure;
    return t;
}

Eigen::VectorXd CountData::counts() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) y(static_cast<Eigen::Index>(i)) = observations_[i].count;
    return y;
}

bool CountData::all_full_exposure() const {
    return std::all_of(observations_.begin(), observations_.end(),
                       [](const auto& o) { return o.exposure == 1.0; });
}

void ZipParams::validate() const {
    if (!(zero_inflation >= 0.0 && zero_inflation < 1.0)) {
        throw DomainError("zero-inflation probability must lie in [0, 1)");
    }
}

WeightedProblem make_poisson_problem(const CountData& data, WeightScheme mode) {
    WeightedProblem problem;
    problem.design = data.design();
    problem.power = 1.0;
    const Eigen::VectorXd t = data.exposures();
    const Eigen::VectorXd y = data.counts();
    if (mode == WeightScheme::Offset) {
        problem.response = y;
        problem.weights = Eigen::VectorXd::Ones(t.size());
        problem.log_offset = t.array().log().matrix();
    } else {
        problem.response = y.cwiseQuotient(t);
        problem.weights = t;
        problem.log_offset = Eigen::VectorXd::Zero(t.size());
    }
    return problem;
}

FitResult poisson_fit(const CountData& data, WeightScheme mode, const FitConfig& config) {
    if (data.counts().sum() == 0.0) throw InitializationError("all claim counts are zero");
    const WeightedProblem problem = make_poisson_problem(data, mode);
    Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data.num_coefficients()));
    if (config.init == InitMode::UserVector) {
        start = config.user_beta;
    } else if (config.init == InitMode::HomogeneousIntercept) {
        start(0) = homogeneous_intercept(problem);
    }
    return fit_problem(problem, start, 1.0, config, mode);
}

namespace {

// Log of pi I(v = 0) + (1 - pi) e^{-m} m^v (factorial dropped) and its
// derivative with respect to log m.
struct ZipTerm {
    double value;
    double d_log_mean;
};

ZipTerm zip_term(double v, double log_mean, double pi) {
    const double m = std::exp(log_mean);
    if (v == 0.0) {
        const double pois0 = std::exp(-m);
        const double mix = pi + (1.0 - pi) * pois0;
        return {std::log(mix), -(1.0 - pi) * pois0 * m / mix};
    }
    return {std::log1p(-pi) - m + v * log_mean, v - m};
}

}  // namespace

double zip_loglik(const ZipParams& params, const CountData& data, WeightScheme mode) {
    params.validate();
    if (static_cast<std::size_t>(params.beta.size()) != data.num_coefficients()) {
        throw DimensionError("beta length does not match the design");
    }
    const Eigen::VectorXd eta = data.design() * params.beta;
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& o = data.observations()[i];
        const auto row = static_cast<Eigen::Index>(i);
        if (mode == WeightScheme::Offset) {
            total += zip_term(o.count, eta(row) + std::log(o.exposure), params.zero_inflation).value;
        } else {
            total += o.exposure * zip_term(o.count / o.exposure, eta(row), params.zero_inflation).value;
        }
    }
    return total;
}

Eigen::VectorXd zip_gradient(const ZipParams& params, const CountData& data, WeightScheme mode) {
    params.validate();
    if (static_cast<std::size_t>(params.beta.size()) != data.num_coefficients()) {
        throw DimensionError("beta length does not match the design");
    }
    const Eigen::VectorXd eta = data.design() * params.beta;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.beta.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& o = data.observations()[i];
        const auto row = static_cast<Eigen::Index>(i);
        double d;
        if (mode == WeightScheme::Offset) {
            d = zip_term(o.count, eta(row) + std::log(o.exposure), params.zero_inflation).d_log_mean;
        } else {
            d = o.exposure * zip_term(o.count / o.exposure, eta(row), params.zero_inflation).d_log_mean;
        }
        grad += d * data.design().row(row).transpose();
    }
    return grad;
}

NonEquivalenceReport zip_nonequivalence_check(const CountData& data, double zero_inflation,
                                              double threshold) {
    NonEquivalenceReport report;
    report.all_full_exposure = data.all_full_exposure();

    const auto k = static_cast<Eigen::Index>(data.num_coefficients());
    Eigen::VectorXd base = Eigen::VectorXd::Zero(k);
    const double total_count = data.counts().sum();
    if (total_count > 0.0) base(0) = std::log(total_count / data.exposures().sum());

    report.probes.push_back(base);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (double delta : {0.5, -0.5}) {
            Eigen::VectorXd b = base;
            b(j) += delta;
            report.probes.push_back(b);
        }
    }
    for (const auto& b : report.probes) {
        const ZipParams params{zero_inflation, b};
        report.differences.push_back(zip_loglik(params, data, WeightScheme::Offset) -
                                     zip_loglik(params, data, WeightScheme::Ratio));
    }
    const auto [lo, hi] = std::minmax_element(report.differences.begin(), report.differences.end());
    report.spread = *hi - *lo;
    report.non_equivalent = !report.all_full_exposure && report.spread > threshold;
    return report;
}

}  // namespace exposure_glm
