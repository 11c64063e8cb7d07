#include <exposure_glm/balance.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace exposure_glm {

namespace {

void check_fit(const Portfolio& portfolio, const FitResult& fit) {
    if (static_cast<std::size_t>(fit.beta_hat.size()) != portfolio.num_coefficients()) {
        throw MismatchError("fit has " + std::to_string(fit.beta_hat.size()) +
                            " coefficients but the portfolio design has " +
                            std::to_string(portfolio.num_coefficients()) + " columns");
    }
    if (fit.num_observations != portfolio.size()) {
        throw MismatchError("fit was produced on " + std::to_string(fit.num_observations) +
                            " contracts, portfolio has " + std::to_string(portfolio.size()));
    }
    if (!fit.converged) throw MismatchError("fit did not converge");
}

double fitted_zeta(const Portfolio& portfolio, const FitResult& fit, std::size_t i) {
    const auto& design = portfolio.design();
    const auto row = static_cast<Eigen::Index>(i);
    double eta = 0.0;
    for (Eigen::Index j = 0; j < design.cols(); ++j) eta += design(row, j) * fit.beta_hat(j);
    return std::exp(eta);
}

}  // namespace

std::vector<GapRecord> individual_gaps(const Portfolio& portfolio, const FitResult& fit) {
    check_fit(portfolio, fit);
    std::vector<GapRecord> gaps;
    gaps.reserve(portfolio.size());
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& obs = portfolio.observations()[i];
        GapRecord g;
        g.contract_id = obs.contract_id;
        g.exposure = obs.exposure;
        g.observed_z = normalize(obs);
        g.fitted_zeta = fitted_zeta(portfolio, fit, i);
        g.gap = g.exposure * (g.observed_z - g.fitted_zeta);
        gaps.push_back(std::move(g));
    }
    return gaps;
}

double portfolio_gap(const std::vector<GapRecord>& gaps) {
    if (gaps.empty()) throw EmptyInputError("gap list is empty");
    double total = 0.0;
    for (const auto& g : gaps) total += g.gap;
    return total;
}

std::vector<ClassBalanceRow> class_report(const Portfolio& portfolio, const FitResult& fit,
                                          std::size_t factor_index) {
    check_fit(portfolio, fit);
    if (factor_index >= portfolio.num_coefficients()) {
        throw DimensionError("factor index " + std::to_string(factor_index) + " out of range");
    }
    const auto names = portfolio.column_names();
    const auto col = static_cast<Eigen::Index>(factor_index);

    std::map<double, ClassBalanceRow> by_level;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& obs = portfolio.observations()[i];
        const double level = portfolio.design()(static_cast<Eigen::Index>(i), col);
        auto& row = by_level[level];
        row.level = level;
        row.contracts += 1;
        row.loss_sum += obs.loss_cost;
        row.premium_sum += obs.exposure * fitted_zeta(portfolio, fit, i);
    }

    std::vector<ClassBalanceRow> rows;
    rows.reserve(by_level.size());
    for (auto& [level, row] : by_level) {
        row.factor_name = names[factor_index];
        row.single_level = by_level.size() == 1;
        if (row.loss_sum > 0.0) row.ratio = row.premium_sum / row.loss_sum;
        rows.push_back(row);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        return a.loss_sum < b.loss_sum;
    });
    return rows;
}

std::vector<GroupSummary> group_summaries(const Portfolio& portfolio, Grouping grouping) {
    (void)grouping;
    GroupSummary full{"full_exposure"};
    GroupSummary mid{"midterm_cancellation"};
    double total_loss = 0.0;
    for (const auto& obs : portfolio.observations()) {
        auto& g = obs.exposure == 1.0 ? full : mid;
        g.contracts += 1;
        g.mean_exposure += obs.exposure;
        g.mean_loss += obs.loss_cost;
        total_loss += obs.loss_cost;
    }
    const double n = static_cast<double>(portfolio.size());
    const double portfolio_mean = total_loss / n;

    std::vector<GroupSummary> out;
    for (auto* g : {&full, &mid}) {
        if (g->contracts == 0) continue;
        const double m = static_cast<double>(g->contracts);
        g->contract_share = m / n;
        g->mean_exposure /= m;
        g->mean_loss /= m;
        if (portfolio_mean > 0.0) g->loss_cost_reference = g->mean_loss / portfolio_mean;
        out.push_back(*g);
    }
    return out;
}

double balance_factor(const Portfolio& portfolio, const FitResult& fit) {
    check_fit(portfolio, fit);
    double premiums = 0.0;
    double losses = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& obs = portfolio.observations()[i];
        premiums += obs.exposure * fitted_zeta(portfolio, fit, i);
        losses += obs.loss_cost;
    }
    if (losses == 0.0) throw DomainError("total loss cost is zero; balance factor undefined");
    return premiums / losses;
}

}  // namespace exposure_glm
