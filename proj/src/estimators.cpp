#include <exposure_glm/estimators.hpp>
#include <exposure_glm/solver.hpp>

#include <cmath>

namespace exposure_glm {

namespace {

void require_psd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("covariance must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw DomainError("covariance is not symmetric");
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) throw FactorizationError("covariance factorization failed");
    if (ldlt.vectorD().size() > 0 && ldlt.vectorD().minCoeff() < -1e-12 * scale) {
        throw FactorizationError("covariance is not positive semi-definite");
    }
}

}  // namespace

PremiumQuote premium(const Eigen::VectorXd& beta, const Eigen::VectorXd& x, double t,
                     std::string contract_id) {
    if (beta.size() != x.size()) throw DimensionError("beta and x lengths differ");
    if (!(t > 0.0 && t <= 1.0)) throw DomainError("exposure must lie in (0, 1]");
    PremiumQuote quote;
    quote.contract_id = std::move(contract_id);
    quote.annualized = std::exp(x.dot(beta));
    quote.exposure_scaled = t * quote.annualized;
    return quote;
}

EstimatorMoments premium_moments(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                                 const Eigen::MatrixXd& covariance, WeightScheme scheme,
                                 MomentBasis basis) {
    if (beta.size() != x.size() || covariance.rows() != x.size()) {
        throw DimensionError("x, beta and covariance dimensions differ");
    }
    require_psd(covariance);
    const double s = x.dot(covariance * x);
    EstimatorMoments m;
    m.scheme = scheme;
    m.basis = basis;
    m.mean = std::exp(x.dot(beta) + 0.5 * s);
    m.variance = std::expm1(s) * m.mean * m.mean;
    return m;
}

std::string_view to_string(Dominance verdict) {
    switch (verdict) {
        case Dominance::StrictlyDominant: return "strictly_dominant";
        case Dominance::DegenerateEqual: return "degenerate_equal";
        case Dominance::Indefinite: return "indefinite";
    }
    return "unknown";
}

DominanceResult covariance_dominance(const Portfolio& portfolio, const Eigen::VectorXd& beta,
                                     const TweedieFamily& family) {
    DominanceResult r;
    r.covariance_offset = asymptotic_covariance(beta, portfolio, WeightScheme::Offset, family);
    r.covariance_ratio = asymptotic_covariance(beta, portfolio, WeightScheme::Ratio, family);
    r.difference = r.covariance_ratio - r.covariance_offset;
    r.difference = 0.5 * (r.difference + r.difference.transpose());

    const double m_norm = r.difference.cwiseAbs().maxCoeff();
    if (portfolio.all_full_exposure()) {
        const double ref = std::max(r.covariance_ratio.cwiseAbs().maxCoeff(), 1.0);
        r.verdict = m_norm <= 1e-10 * ref ? Dominance::DegenerateEqual : Dominance::Indefinite;
        return r;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(r.difference);
    r.verdict = llt.info() == Eigen::Success ? Dominance::StrictlyDominant : Dominance::Indefinite;
    return r;
}

MomentOrdering moment_ordering(const Eigen::VectorXd& x, const Eigen::VectorXd& beta,
                               const Portfolio& portfolio, const TweedieFamily& family,
                               MomentBasis basis) {
    MomentOrdering out;
    out.offset = premium_moments(x, beta, asymptotic_covariance(beta, portfolio, WeightScheme::Offset, family),
                                 WeightScheme::Offset, basis);
    out.ratio = premium_moments(x, beta, asymptotic_covariance(beta, portfolio, WeightScheme::Ratio, family),
                                WeightScheme::Ratio, basis);
    out.all_full_exposure = portfolio.all_full_exposure();
    if (out.all_full_exposure) {
        out.mean_ordered = out.offset.mean == out.ratio.mean;
        out.variance_ordered = out.offset.variance == out.ratio.variance;
    } else {
        out.mean_ordered = out.offset.mean < out.ratio.mean;
        out.variance_ordered = out.offset.variance < out.ratio.variance;
    }
    return out;
}

double expected_random_gap(const Portfolio& portfolio, const Eigen::VectorXd& beta,
                           const TweedieFamily& family, WeightScheme scheme) {
    const Eigen::MatrixXd cov = asymptotic_covariance(beta, portfolio, scheme, family);
    const Eigen::MatrixXd& design = portfolio.design();
    double gap = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const Eigen::VectorXd x = design.row(static_cast<Eigen::Index>(i)).transpose();
        const double zeta = std::exp(x.dot(beta));
        const double expected = premium_moments(x, beta, cov, scheme).mean;
        gap += portfolio.observations()[i].exposure * (zeta - expected);
    }
    return gap;
}

}  // namespace exposure_glm
