#pragma once

// Synthetic portfolios: the ranked-exposure gap experiment and a two-group
// "mid-term cancellation" mimic portfolio.
//
// Randomness comes from std::mt19937_64, whose output sequence is fixed by the
// C++ standard. All draws are derived from its raw 64-bit output by the
// samplers in PortableRng (53-bit uniforms, inversion / Marsaglia-Tsang), so
// the same seed yields the same portfolio with any conforming standard library.

#include <exposure_glm/model.hpp>
#include <exposure_glm/solver.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace exposure_glm {

class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double prob) { return uniform() < prob; }
    int binomial(int trials, double prob);
    int poisson(double mean);
    double normal();
    /// Gamma with the given shape and scale (mean = shape * scale).
    double gamma(double shape, double scale);

private:
    std::mt19937_64 engine_;
};

inline constexpr double kMinSimulatedExposure = 30.0 / 365.0;
inline constexpr double kMaxSimulatedExposure = 335.0 / 365.0;

enum class Scenario { Increasing, Decreasing };
enum class CovariateMode { Bernoulli, BinomialCount };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

struct ScenarioConfig {
    std::size_t n = 100;
    Scenario scenario = Scenario::Increasing;
    bool heterogeneous = false;
    double p = 1.42;
    std::uint64_t seed = 2024;
    /// Use y_i = n - i - 1 verbatim in the decreasing scenario (produces a
    /// negative loss at i = n, so portfolio construction rejects it).
    bool literal_decreasing = false;
    CovariateMode covariate_mode = CovariateMode::Bernoulli;
    FitConfig fit;

    void validate() const;
};

struct SyntheticPortfolio {
    Portfolio portfolio;
    std::uint64_t seed = 0;
    std::optional<Scenario> scenario;
    std::string generator;
};

/// n i.i.d. uniforms on [30/365, 335/365], sorted ascending.
std::vector<double> gen_exposures(std::size_t n, std::uint64_t seed);

/// Loss for rank i = 1..n: Increasing y_i = i; Decreasing y_i = n - i + 1
/// (or n - i - 1 when `literal` is set).
std::vector<double> gen_losses(std::size_t n, Scenario scenario, bool literal = false);

/// n x 2 matrix of risk factors: Bernoulli(0.75) and Bernoulli(0.15) per
/// contract, or Binomial(100, .) counts in BinomialCount mode.
Eigen::MatrixXd gen_covariates(std::size_t n, std::uint64_t seed,
                               CovariateMode mode = CovariateMode::Bernoulli);

/// Portfolio for the ranked-exposure experiment. In heterogeneous mode the
/// covariates are redrawn from the same stream until the design has full rank.
SyntheticPortfolio build_scenario_portfolio(const ScenarioConfig& config);

struct ExperimentRow {
    std::size_t rank = 0;
    double exposure = 0.0;
    double loss = 0.0;
    double zeta_offset = 0.0;
    double zeta_ratio = 0.0;
    double gap_offset = 0.0;
    double gap_ratio = 0.0;
};

struct ExperimentReport {
    ScenarioConfig config;
    SyntheticPortfolio data;
    FitResult fit_offset;
    FitResult fit_ratio;
    std::vector<ExperimentRow> rows;
    double total_gap_offset = 0.0;
    double total_gap_ratio = 0.0;
    double total_loss = 0.0;
};

/// Builds the portfolio, fits both schemes and collects per-contract gaps.
ExperimentReport run_gap_experiment(const ScenarioConfig& config);

/// Loss generator for the mimic portfolio. Claim counts are Poisson with
/// annual frequency base_frequency * exp(x' log_relativities), multiplied for
/// mid-term contracts by midterm_scale * (midterm_trend - t); claim sizes are
/// gamma with the given mean and shape.
struct MimicConfig {
    double base_frequency = 0.15;
    double severity_mean = 3000.0;
    double severity_shape = 1.5;
    double midterm_scale = 7.9;
    double midterm_trend = 1.6;
    std::vector<double> factor_probabilities{0.5, 0.3, 0.2};
    std::vector<double> log_relativities{0.25, 0.4, -0.3};
};

/// round(share_midterm * n) mid-term contracts with uniform exposures on
/// [30/365, 335/365] followed by full-year contracts (t = 1).
SyntheticPortfolio gen_mimic_portfolio(double share_midterm, std::size_t n, std::uint64_t seed,
                                       const MimicConfig& config = {});

}  // namespace exposure_glm
