#include <exposure_glm/estimators.hpp>
#include <exposure_glm/solver.hpp>

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exposure_glm;

TEST(Premium, ExposureScaling) {
    const PremiumQuote q = premium(Eigen::Vector2d(std::log(10.0), 0.5), Eigen::Vector2d(1.0, 2.0), 0.25, "A");
    EXPECT_NEAR(q.annualized, 10.0 * std::exp(1.0), 1e-12);
    EXPECT_NEAR(q.exposure_scaled, 2.5 * std::exp(1.0), 1e-12);
    EXPECT_EQ(q.contract_id, "A");
    EXPECT_THROW(premium(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), 0.0), DomainError);
    EXPECT_THROW(premium(Eigen::Vector2d(0, 0), Eigen::Vector3d(1, 0, 0), 1.0), DimensionError);
}

TEST(PremiumMoments, ScalarLognormal) {
    Eigen::MatrixXd cov(1, 1);
    cov << 0.02;
    const auto m = premium_moments(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Constant(1, std::log(100.0)), cov,
                                   WeightScheme::Ratio);
    EXPECT_NEAR(m.mean, 101.005016708417, 1e-9);
    EXPECT_NEAR(m.variance, 206.094341656324, 1e-8);
    EXPECT_EQ(m.scheme, WeightScheme::Ratio);
}

TEST(PremiumMoments, ZeroCovarianceIsDegenerate) {
    const auto m = premium_moments(Eigen::Vector2d(1, 1), Eigen::Vector2d(0.5, 0.25), Eigen::MatrixXd::Zero(2, 2),
                                   WeightScheme::Offset, MomentBasis::PlugIn);
    EXPECT_NEAR(m.mean, std::exp(0.75), 1e-14);
    EXPECT_EQ(m.variance, 0.0);
    EXPECT_EQ(m.basis, MomentBasis::PlugIn);
}

TEST(PremiumMoments, RejectsIndefiniteCovariance) {
    Eigen::Matrix2d cov;
    cov << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(premium_moments(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0), cov, WeightScheme::Ratio),
                 FactorizationError);
}

TEST(CovarianceDominance, ScalarDifference) {
    const Portfolio p = fixtures::make_portfolio({0.25, 1.0}, {1.0, 2.0});
    const DominanceResult d = covariance_dominance(p, Eigen::VectorXd::Zero(1), TweedieFamily(1.5));
    EXPECT_EQ(d.verdict, Dominance::StrictlyDominant);
    EXPECT_NEAR(d.difference(0, 0), 0.133333333333333, 1e-12);
}

TEST(CovarianceDominance, FullExposureIsDegenerate) {
    const Portfolio p = fixtures::make_portfolio({1, 1, 1, 1}, {1, 2, 0, 3}, {{0}, {1}, {1}, {0}});
    const DominanceResult d = covariance_dominance(p, Eigen::Vector2d(0.3, 0.1), TweedieFamily(1.42));
    EXPECT_EQ(d.verdict, Dominance::DegenerateEqual);
    EXPECT_LT(d.difference.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(to_string(d.verdict), "degenerate_equal");
}

TEST(MomentOrdering, StrictWhenSomeExposureBelowOne) {
    const Portfolio p = fixtures::toy_portfolio();
    const MomentOrdering m = moment_ordering(Eigen::Vector2d(1, 1), Eigen::Vector2d(2.0, 0.5), p, TweedieFamily(1.5));
    EXPECT_TRUE(m.holds());
    EXPECT_LT(m.offset.mean, m.ratio.mean);
    EXPECT_LT(m.offset.variance, m.ratio.variance);
    EXPECT_FALSE(m.all_full_exposure);
}

TEST(MomentOrdering, EqualWhenAllFullExposure) {
    const Portfolio p = fixtures::make_portfolio({1, 1, 1}, {1, 2, 3});
    const MomentOrdering m = moment_ordering(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), p, TweedieFamily(1.5));
    EXPECT_TRUE(m.all_full_exposure);
    EXPECT_TRUE(m.holds());
    EXPECT_NEAR(m.offset.mean, m.ratio.mean, 1e-14);
}

TEST(ExpectedRandomGap, NonPositiveAndOrdered) {
    const Portfolio p = fixtures::toy_portfolio();
    const TweedieFamily fam(1.5, 2.0);
    const Eigen::Vector2d beta(2.0, 1.0);
    const double go = expected_random_gap(p, beta, fam, WeightScheme::Offset);
    const double gr = expected_random_gap(p, beta, fam, WeightScheme::Ratio);
    EXPECT_LT(go, 0.0);
    EXPECT_LE(gr, go);
}
