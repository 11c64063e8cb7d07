#include <exposure_glm/model.hpp>

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exposure_glm;

TEST(TweedieFamily, RejectsPowerOutsideOpenInterval) {
    EXPECT_THROW(TweedieFamily(1.0), DomainError);
    EXPECT_THROW(TweedieFamily(2.0), DomainError);
    EXPECT_THROW(TweedieFamily(1.5, 0.0), DomainError);
    EXPECT_THROW(TweedieFamily(std::nan("")), DomainError);
    EXPECT_NO_THROW(TweedieFamily(1.42, 2.5));
}

TEST(TweedieFamily, CanonicalParameter) {
    const TweedieFamily fam(1.5);
    // mu^(1-p)/(1-p) at mu = 4: 4^-0.5 / -0.5 = -1
    EXPECT_NEAR(fam.canonical_parameter(4.0), -1.0, 1e-15);
}

TEST(Weights, OffsetAndRatio) {
    EXPECT_DOUBLE_EQ(weight(WeightScheme::Ratio, 0.25, 1.5), 0.25);
    EXPECT_NEAR(weight(WeightScheme::Offset, 0.25, 1.5), 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(weight(WeightScheme::Offset, 1.0, 1.3), 1.0);
    EXPECT_THROW(weight(WeightScheme::Ratio, 0.0, 1.5), DomainError);
    EXPECT_THROW(weight(WeightScheme::Ratio, 1.01, 1.5), DomainError);
    EXPECT_THROW(weight(WeightScheme::Offset, 0.5, 2.0), DomainError);
}

TEST(Weights, OffsetWeightIsAtLeastRatioWeight) {
    for (double p : {1.05, 1.42, 1.95}) {
        for (double t = 0.01; t <= 1.0; t += 0.01) {
            EXPECT_GE(weight(WeightScheme::Offset, t, p), weight(WeightScheme::Ratio, t, p));
        }
    }
}

TEST(ScaleParams, TwoContractExample) {
    const TweedieParams scaled = scale_params(TweedieParams(10.0, 1.0, TweedieFamily(1.5)), 0.5);
    EXPECT_NEAR(scaled.mean, 5.0, 1e-15);
    EXPECT_NEAR(scaled.weight, 1.414213562373095, 1e-12);
    EXPECT_EQ(scaled.family.power(), 1.5);
}

TEST(Observation, Validation) {
    EXPECT_THROW(validate(Observation{"a", 0.0, 1.0, {}}), DomainError);
    EXPECT_THROW(validate(Observation{"a", 1.5, 1.0, {}}), DomainError);
    EXPECT_THROW(validate(Observation{"a", 0.5, -1.0, {}}), DomainError);
    EXPECT_THROW(validate(Observation{"a", 0.5, 1.0, {std::nan("")}}), DomainError);
    EXPECT_NO_THROW(validate(Observation{"a", 1.0, 0.0, {2.0}}));
    EXPECT_DOUBLE_EQ(normalize(Observation{"a", 0.25, 3.0, {}}), 12.0);
}

TEST(Portfolio, DesignAndAccessors) {
    const Portfolio p = fixtures::toy_portfolio();
    EXPECT_EQ(p.size(), 5u);
    EXPECT_EQ(p.num_coefficients(), 2u);
    EXPECT_EQ(p.column_names(), (std::vector<std::string>{"(intercept)", "x1"}));
    EXPECT_EQ(p.design()(3, 0), 1.0);
    EXPECT_EQ(p.design()(3, 1), 1.0);
    EXPECT_NEAR(p.normalized_losses()(1), 60.0, 1e-12);
    EXPECT_FALSE(p.all_full_exposure());
}

TEST(Portfolio, RejectsTooFewRows) {
    EXPECT_THROW(fixtures::make_portfolio({1.0}, {1.0}, {{1.0}}), Error);
    EXPECT_THROW(Portfolio({}), EmptyInputError);
}

TEST(Portfolio, RankDeficiencyNamesColumns) {
    std::vector<Observation> obs;
    for (int i = 0; i < 6; ++i) {
        const double a = i % 2;
        obs.push_back({fixtures::contract_id(i), 1.0, 1.0 + i, {a, 1.0 - a, double(i)}});
    }
    try {
        Portfolio p(std::move(obs), {"male", "female", "age"});
        FAIL() << "expected RankDeficientError";
    } catch (const RankDeficientError& e) {
        EXPECT_EQ(e.kind(), "rank_deficient");
        const auto& cols = e.columns();
        EXPECT_NE(std::find(cols.begin(), cols.end(), "female"), cols.end());
        EXPECT_NE(std::find(cols.begin(), cols.end(), "(intercept)"), cols.end());
        EXPECT_EQ(std::find(cols.begin(), cols.end(), "age"), cols.end());
    }
}

TEST(Portfolio, ConstantCovariateIsRankDeficient) {
    EXPECT_THROW(fixtures::make_portfolio({1, 1, 1}, {1, 2, 3}, {{2}, {2}, {2}}), RankDeficientError);
}

TEST(QuasiLoglik, ToyValuesAtFittedCoefficients) {
    const Portfolio p = fixtures::toy_portfolio();
    const TweedieFamily fam(1.5);
    Eigen::VectorXd bo(2), br(2);
    bo << 2.134520771839782, 1.637908860990822;
    br << std::log(10.0), 1.477266139228937;
    EXPECT_NEAR(quasi_loglik(bo, p, WeightScheme::Offset, fam), -81.34733667300956, 1e-8);
    EXPECT_NEAR(quasi_loglik(br, p, WeightScheme::Ratio, fam), -68.24767177313448, 1e-8);
}

TEST(QuasiLoglik, ScalesWithDispersion) {
    const Portfolio p = fixtures::toy_portfolio();
    Eigen::VectorXd b(2);
    b << 2.0, 1.0;
    const double l1 = quasi_loglik(b, p, WeightScheme::Ratio, TweedieFamily(1.5, 1.0));
    const double l2 = quasi_loglik(b, p, WeightScheme::Ratio, TweedieFamily(1.5, 2.0));
    EXPECT_NEAR(l2, l1 / 2.0, 1e-12);
}

TEST(Kernels, DMatrixMatchesDefinition) {
    const Portfolio p = fixtures::toy_portfolio();
    const TweedieFamily fam(1.42);
    Eigen::VectorXd b(2);
    b << 0.3, -0.2;
    const Eigen::VectorXd d = d_matrix(b, p, WeightScheme::Offset, fam);
    for (Eigen::Index i = 0; i < 5; ++i) {
        const double t = p.exposures()(i);
        const double eta = p.design().row(i).dot(b);
        EXPECT_NEAR(d(i), std::pow(t, 0.58) * std::exp(0.58 * eta), 1e-14);
    }
}

TEST(Kernels, FisherIsSymmetricPositiveDefinite) {
    const Portfolio p = fixtures::toy_portfolio();
    Eigen::VectorXd b(2);
    b << 1.0, 0.5;
    const Eigen::MatrixXd f = fisher_info(b, p, WeightScheme::Ratio, TweedieFamily(1.5, 2.0));
    EXPECT_NEAR((f - f.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    EXPECT_GT(f.llt().matrixL()(1, 1), 0.0);
    const Eigen::MatrixXd f1 = fisher_info(b, p, WeightScheme::Ratio, TweedieFamily(1.5, 1.0));
    EXPECT_NEAR((f1 / 2.0 - f).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Kernels, DimensionMismatchThrows) {
    const Portfolio p = fixtures::toy_portfolio();
    EXPECT_THROW(gradient(Eigen::VectorXd::Zero(3), p, WeightScheme::Ratio, TweedieFamily(1.5)), DimensionError);
}

TEST(WeightSchemeText, RoundTrip) {
    for (auto s : kBothSchemes) EXPECT_EQ(parse_weight_scheme(to_string(s)), s);
    EXPECT_THROW(parse_weight_scheme("exposure"), DomainError);
}

TEST(OffsetFormulation, SameObjectiveAsWeightedForm) {
    // With mu = t zeta the raw objective factors as t^(2-p) times the kernel in z.
    const Portfolio p = fixtures::toy_portfolio();
    const TweedieFamily fam(1.5);
    const WeightedProblem raw = make_offset_formulation(p, fam);
    const WeightedProblem weighted = make_problem(p, WeightScheme::Offset, fam);
    Eigen::VectorXd a(2), b(2);
    a << 1.0, 0.2;
    b << 2.5, -0.4;
    EXPECT_NEAR(quasi_loglik(raw, a), quasi_loglik(weighted, a), 1e-10);
    EXPECT_NEAR(quasi_loglik(raw, b), quasi_loglik(weighted, b), 1e-10);
}
