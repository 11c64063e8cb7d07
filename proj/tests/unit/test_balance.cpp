#include <exposure_glm/balance.hpp>

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exposure_glm;

TEST(Gaps, TwoContractPortfolio) {
    const Portfolio p = fixtures::two_contracts();
    const TweedieFamily fam(1.5);
    const auto go = individual_gaps(p, fit(p, WeightScheme::Offset, fam));
    const auto gr = individual_gaps(p, fit(p, WeightScheme::Ratio, fam));
    ASSERT_EQ(go.size(), 2u);
    EXPECT_EQ(go[0].contract_id, "C1");
    EXPECT_NEAR(go[0].observed_z, 10.0, 1e-14);
    EXPECT_NEAR(go[0].gap, 0.5 * (10.0 - go[0].fitted_zeta), 1e-14);
    EXPECT_NEAR(portfolio_gap(go), 1.21320343559642, 1e-10);
    EXPECT_NEAR(portfolio_gap(gr), 0.0, 1e-10);
}

TEST(Gaps, EmptyListThrows) { EXPECT_THROW(portfolio_gap({}), EmptyInputError); }

TEST(Gaps, MismatchedFitThrows) {
    const Portfolio toy = fixtures::toy_portfolio();
    const Portfolio two = fixtures::two_contracts();
    const FitResult r = fit(two, WeightScheme::Ratio, TweedieFamily(1.5));
    EXPECT_THROW(individual_gaps(toy, r), MismatchError);
    FitResult unconverged = fit(toy, WeightScheme::Ratio, TweedieFamily(1.5));
    unconverged.converged = false;
    EXPECT_THROW(individual_gaps(toy, unconverged), MismatchError);
}

TEST(BalanceFactor, RatioIsOneOffsetIsNot) {
    const Portfolio p = fixtures::toy_portfolio();
    const TweedieFamily fam(1.5);
    EXPECT_NEAR(balance_factor(p, fit(p, WeightScheme::Ratio, fam)), 1.0, 1e-9);
    EXPECT_LT(balance_factor(p, fit(p, WeightScheme::Offset, fam)), 0.99);
}

TEST(ClassReport, ToyLevels) {
    const Portfolio p = fixtures::toy_portfolio();
    const FitResult r = fit(p, WeightScheme::Ratio, TweedieFamily(1.5));
    const auto rows = class_report(p, r, 1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].factor_name, "x1");
    EXPECT_EQ(rows[0].level, 0.0);
    EXPECT_EQ(rows[0].contracts, 2u);
    EXPECT_NEAR(rows[0].loss_sum, 10.0, 1e-14);
    EXPECT_NEAR(rows[1].loss_sum, 92.0, 1e-14);
    // ratio scores balance every level of a binary factor
    ASSERT_TRUE(rows[0].ratio.has_value());
    EXPECT_NEAR(*rows[0].ratio, 1.0, 1e-8);
    EXPECT_NEAR(*rows[1].ratio, 1.0, 1e-8);
    EXPECT_FALSE(rows[0].single_level);

    const auto intercept = class_report(p, r, 0);
    ASSERT_EQ(intercept.size(), 1u);
    EXPECT_TRUE(intercept[0].single_level);
    EXPECT_THROW(class_report(p, r, 2), DimensionError);
}

TEST(ClassReport, ZeroLossLevelHasNoRatio) {
    const Portfolio p = fixtures::make_portfolio({0.5, 1.0, 0.3, 0.8}, {0, 4, 0, 2}, {{1}, {0}, {1}, {0}});
    const auto rows = class_report(p, fit(p, WeightScheme::Offset, TweedieFamily(1.5)), 1);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].level, 1.0);
    EXPECT_FALSE(rows[0].ratio.has_value());
}

TEST(GroupSummaries, FullExposureFirst) {
    const auto g = group_summaries(fixtures::toy_portfolio());
    ASSERT_EQ(g.size(), 2u);
    EXPECT_EQ(g[0].label, "full_exposure");
    EXPECT_EQ(g[0].contracts, 1u);
    EXPECT_NEAR(g[0].contract_share, 0.2, 1e-15);
    EXPECT_NEAR(*g[0].loss_cost_reference, 50.0 / 20.4, 1e-12);
    EXPECT_EQ(g[1].label, "midterm_cancellation");
    EXPECT_NEAR(g[1].mean_exposure, 0.525, 1e-15);

    const auto only_full = group_summaries(fixtures::make_portfolio({1, 1}, {1, 2}));
    ASSERT_EQ(only_full.size(), 1u);
}

TEST(GroupSummaries, ZeroPortfolioLossHasNoReference) {
    const auto g = group_summaries(fixtures::make_portfolio({1, 0.5}, {0, 0}));
    for (const auto& row : g) EXPECT_FALSE(row.loss_cost_reference.has_value());
}
