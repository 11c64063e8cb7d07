#include <exposure_glm/simulate.hpp>
#include <exposure_glm/balance.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exposure_glm {

namespace {

constexpr std::uint64_t kCovariateStream = 0x9E3779B97F4A7C15ULL;
constexpr int kMaxRedraws = 1000;

bool full_rank(const Eigen::MatrixXd& design) {
    try {
        require_full_rank(design, {});
        return true;
    } catch (const RankDeficientError&) {
        return false;
    }
}

std::string contract_id(std::size_t i) {
    std::string digits = std::to_string(i);
    return "C" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

}  // namespace

double PortableRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

int PortableRng::binomial(int trials, double prob) {
    int count = 0;
    for (int k = 0; k < trials; ++k) count += bernoulli(prob) ? 1 : 0;
    return count;
}

int PortableRng::poisson(double mean) {
    if (!(mean >= 0.0)) throw DomainError("Poisson mean must be non-negative");
    // Multiplicative inversion on chunks of at most 10 keeps exp(-chunk) well scaled.
    int total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double chunk = std::min(remaining, 10.0);
        remaining -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        while (prod > limit) {
            ++total;
            prod *= uniform();
        }
    }
    return total;
}

double PortableRng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double PortableRng::gamma(double shape, double scale) {
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("gamma shape and scale must be positive");
    if (shape < 1.0) {
        const double u = 1.0 - uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia and Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v * scale;
    }
}

std::string_view to_string(Scenario scenario) {
    return scenario == Scenario::Increasing ? "increasing" : "decreasing";
}

Scenario parse_scenario(std::string_view text) {
    if (text == "increasing") return Scenario::Increasing;
    if (text == "decreasing") return Scenario::Decreasing;
    throw DomainError("unknown scenario '" + std::string(text) + "'");
}

void ScenarioConfig::validate() const {
    if (n < 2) throw DomainError("scenario needs at least 2 contracts");
    if (!(p > 1.0 && p < 2.0)) throw DomainError("variance power must lie in (1, 2)");
    fit.validate();
}

std::vector<double> gen_exposures(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw DomainError("need at least 2 exposures");
    PortableRng rng(seed);
    std::vector<double> t(n);
    for (auto& v : t) v = rng.uniform(kMinSimulatedExposure, kMaxSimulatedExposure);
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<double> gen_losses(std::size_t n, Scenario scenario, bool literal) {
    std::vector<double> y(n);
    const auto nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<double>(k + 1);
        if (scenario == Scenario::Increasing) {
            y[k] = i;
        } else {
            y[k] = literal ? nn - i - 1.0 : nn - i + 1.0;
        }
    }
    return y;
}

namespace {

Eigen::MatrixXd draw_covariates(PortableRng& rng, std::size_t n, CovariateMode mode) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (mode == CovariateMode::Bernoulli) {
            x(i, 0) = rng.bernoulli(0.75) ? 1.0 : 0.0;
            x(i, 1) = rng.bernoulli(0.15) ? 1.0 : 0.0;
        } else {
            x(i, 0) = rng.binomial(100, 0.75);
            x(i, 1) = rng.binomial(100, 0.15);
        }
    }
    return x;
}

}  // namespace

Eigen::MatrixXd gen_covariates(std::size_t n, std::uint64_t seed, CovariateMode mode) {
    PortableRng rng(seed);
    return draw_covariates(rng, n, mode);
}

SyntheticPortfolio build_scenario_portfolio(const ScenarioConfig& config) {
    config.validate();
    const auto t = gen_exposures(config.n, config.seed);
    const auto y = gen_losses(config.n, config.scenario, config.literal_decreasing);

    Eigen::MatrixXd x;
    if (config.heterogeneous) {
        if (config.n < 3) throw DomainError("heterogeneous scenario needs at least 3 contracts");
        PortableRng rng(config.seed ^ kCovariateStream);
        int attempts = 0;
        for (;;) {
            x = draw_covariates(rng, config.n, config.covariate_mode);
            Eigen::MatrixXd design(x.rows(), 3);
            design << Eigen::VectorXd::Ones(x.rows()), x;
            if (full_rank(design)) break;
            if (++attempts >= kMaxRedraws) {
                throw RankDeficientError("could not draw a full-rank covariate matrix", {"x1", "x2"});
            }
        }
    }

    std::vector<Observation> obs;
    obs.reserve(config.n);
    for (std::size_t i = 0; i < config.n; ++i) {
        Observation o{contract_id(i + 1), t[i], y[i], {}};
        if (config.heterogeneous) {
            o.covariates = {x(static_cast<Eigen::Index>(i), 0), x(static_cast<Eigen::Index>(i), 1)};
        }
        obs.push_back(std::move(o));
    }
    std::vector<std::string> names;
    if (config.heterogeneous) names = {"x1", "x2"};
    return SyntheticPortfolio{Portfolio(std::move(obs), std::move(names)), config.seed, config.scenario,
                              "ranked_exposure"};
}

ExperimentReport run_gap_experiment(const ScenarioConfig& config) {
    ExperimentReport report{config, build_scenario_portfolio(config), {}, {}, {}, 0.0, 0.0, 0.0};
    const Portfolio& portfolio = report.data.portfolio;
    const TweedieFamily family(config.p);

    report.fit_offset = fit(portfolio, WeightScheme::Offset, family, config.fit);
    report.fit_ratio = fit(portfolio, WeightScheme::Ratio, family, config.fit);
    if (!report.fit_offset.converged || !report.fit_ratio.converged) {
        throw NonFiniteError("IRLS did not converge on the scenario portfolio");
    }
    const auto gaps_o = individual_gaps(portfolio, report.fit_offset);
    const auto gaps_r = individual_gaps(portfolio, report.fit_ratio);

    report.rows.reserve(portfolio.size());
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        ExperimentRow row;
        row.rank = i + 1;
        row.exposure = gaps_o[i].exposure;
        row.loss = portfolio.observations()[i].loss_cost;
        row.zeta_offset = gaps_o[i].fitted_zeta;
        row.zeta_ratio = gaps_r[i].fitted_zeta;
        row.gap_offset = gaps_o[i].gap;
        row.gap_ratio = gaps_r[i].gap;
        report.rows.push_back(row);
        report.total_loss += row.loss;
    }
    report.total_gap_offset = portfolio_gap(gaps_o);
    report.total_gap_ratio = portfolio_gap(gaps_r);
    return report;
}

SyntheticPortfolio gen_mimic_portfolio(double share_midterm, std::size_t n, std::uint64_t seed,
                                       const MimicConfig& config) {
    if (!(share_midterm > 0.0 && share_midterm < 1.0)) {
        throw DomainError("mid-term share must lie in (0, 1)");
    }
    const std::size_t q = config.factor_probabilities.size();
    if (config.log_relativities.size() != q) {
        throw DimensionError("mimic factor probabilities and relativities differ in length");
    }
    if (n < q + 1) throw DomainError("mimic portfolio too small for its risk factors");

    const auto n_mid = static_cast<std::size_t>(std::llround(share_midterm * static_cast<double>(n)));
    PortableRng rng(seed);

    std::vector<double> t(n, 1.0);
    for (std::size_t i = 0; i < n_mid; ++i) t[i] = rng.uniform(kMinSimulatedExposure, kMaxSimulatedExposure);
    std::sort(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n_mid));

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(q + 1));
    int attempts = 0;
    for (;;) {
        for (Eigen::Index i = 0; i < design.rows(); ++i) {
            design(i, 0) = 1.0;
            for (std::size_t j = 0; j < q; ++j) {
                design(i, static_cast<Eigen::Index>(j + 1)) = rng.bernoulli(config.factor_probabilities[j]) ? 1.0 : 0.0;
            }
        }
        if (full_rank(design)) break;
        if (++attempts >= kMaxRedraws) {
            throw RankDeficientError("could not draw a full-rank mimic design", {});
        }
    }

    const double scale = config.severity_mean / config.severity_shape;
    std::vector<Observation> obs;
    std::vector<std::string> names;
    for (std::size_t j = 1; j <= q; ++j) names.push_back("x" + std::to_string(j));
    obs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        double score = 0.0;
        for (std::size_t j = 0; j < q; ++j) score += design(row, static_cast<Eigen::Index>(j + 1)) * config.log_relativities[j];
        double frequency = config.base_frequency * std::exp(score);
        if (i < n_mid) frequency *= config.midterm_scale * (config.midterm_trend - t[i]);
        const int claims = rng.poisson(frequency * t[i]);
        double loss = 0.0;
        for (int k = 0; k < claims; ++k) loss += rng.gamma(config.severity_shape, scale);

        Observation o{contract_id(i + 1), t[i], loss, {}};
        for (std::size_t j = 0; j < q; ++j) o.covariates.push_back(design(row, static_cast<Eigen::Index>(j + 1)));
        obs.push_back(std::move(o));
    }
    return SyntheticPortfolio{Portfolio(std::move(obs), std::move(names)), seed, std::nullopt, "mimic"};
}

}  // namespace exposure_glm
