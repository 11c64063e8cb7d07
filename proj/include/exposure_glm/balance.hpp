#pragma once

// Observed-gap diagnostics: how far exposure-scaled premiums sit from the
// observed loss costs, per contract, per risk class and for the portfolio.

#include <exposure_glm/model.hpp>
#include <exposure_glm/solver.hpp>

#include <optional>
#include <string>
#include <vector>

namespace exposure_glm {

struct GapRecord {
    std::string contract_id;
    double exposure = 0.0;
    double observed_z = 0.0;
    double fitted_zeta = 0.0;
    double gap = 0.0;  // exposure * (observed_z - fitted_zeta)
};

/// One record per contract in portfolio order. Throws MismatchError if the fit
/// was produced on a portfolio of a different shape or did not converge.
std::vector<GapRecord> individual_gaps(const Portfolio& portfolio, const FitResult& fit);

/// Left-to-right sum of the gaps. Throws EmptyInputError on an empty list.
double portfolio_gap(const std::vector<GapRecord>& gaps);

struct ClassBalanceRow {
    std::string factor_name;
    double level = 0.0;
    std::size_t contracts = 0;
    double loss_sum = 0.0;
    double premium_sum = 0.0;
    std::optional<double> ratio;  // premium_sum / loss_sum, empty when loss_sum == 0
    bool single_level = false;    // the factor is constant on the portfolio
};

/// Aggregated losses and exposure-scaled premiums for each distinct value of
/// design column `factor_index` (0 is the intercept). Rows are sorted by
/// loss_sum ascending, ties by level.
std::vector<ClassBalanceRow> class_report(const Portfolio& portfolio, const FitResult& fit,
                                          std::size_t factor_index);

struct GroupSummary {
    std::string label;
    std::size_t contracts = 0;
    double contract_share = 0.0;
    double mean_exposure = 0.0;
    double mean_loss = 0.0;
    std::optional<double> loss_cost_reference;  // group mean loss / portfolio mean loss
};

enum class Grouping { FullExposureVsMidterm };

/// Non-empty groups only, "full_exposure" (t = 1) first, then "midterm_cancellation".
std::vector<GroupSummary> group_summaries(const Portfolio& portfolio,
                                          Grouping grouping = Grouping::FullExposureVsMidterm);

/// sum_i t_i zeta_hat_i / sum_i y_i. Throws DomainError when sum y == 0.
double balance_factor(const Portfolio& portfolio, const FitResult& fit);

}  // namespace exposure_glm
