#pragma once

// Subcommands behind the `exposure-glm` executable. Each command writes its
// artifacts into `output_dir` (created if missing) and returns their paths.
//
// Output schemas (JSON files carry "schema_version"):
//   fit.json            fitted coefficients, covariance, convergence trace per scheme
//   coeff_ratios.csv    covariate,beta_offset,beta_ratio,ratio
//   premium_ratios.csv  quantile,premium_ratio      (zeta_offset / zeta_ratio per contract)
//   gaps.csv            contract_id,exposure,z,zeta_offset,zeta_ratio,gap_offset,gap_ratio
//   class_balance.csv   factor,level,loss_sum,premium_sum_offset,premium_sum_ratio,ratio_offset,ratio_ratio
//   balance.json        balance factors, portfolio gaps, group summaries
//   simulation.csv      rank,exposure,gap_offset,gap_ratio
//   totals.json         scenario totals
//   portfolio.csv       generated portfolio in the input schema
//   counts.json         Poisson fits in both modes and the ZIP evidence report

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace exposure_glm::cli {

inline constexpr int kSchemaVersion = 1;

enum class Command { Fit, Compare, Simulate, Balance, Counts };
enum class SchemeChoice { Offset, Ratio, Both };

struct RunConfig {
    Command command = Command::Fit;
    std::filesystem::path input;
    std::filesystem::path output_dir = ".";
    double p = 1.42;
    double phi = 1.0;
    SchemeChoice scheme = SchemeChoice::Both;
    double tolerance = 1e-8;
    int max_iterations = 100;
    bool step_halving = false;
    std::uint64_t seed = 2024;
    std::string scenario = "increasing";
    bool heterogeneous = false;
    std::size_t n = 100;
    bool literal_decreasing = false;
    bool binomial_counts = false;
    bool mimic = false;
    double share_midterm = 0.36;
    double zero_inflation = 0.3;

    void validate() const;
};

std::vector<std::filesystem::path> cmd_fit(const RunConfig& config);
std::vector<std::filesystem::path> cmd_compare(const RunConfig& config);
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& config);
std::vector<std::filesystem::path> cmd_balance(const RunConfig& config);
std::vector<std::filesystem::path> cmd_counts(const RunConfig& config);

/// Dispatches on config.command.
std::vector<std::filesystem::path> run(const RunConfig& config);

/// {"schema_version":1,"error":{"kind":...,"message":...}} for any exception.
std::string error_json(const std::exception& error);

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double prob);

}  // namespace exposure_glm::cli
