#pragma once

// Small portfolios and random generators shared by the unit and acceptance
// suites. The random helpers use std::mt19937_64 directly so the tests do not
// depend on the library's own samplers.

#include <exposure_glm/claim_count.hpp>
#include <exposure_glm/model.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using exposure_glm::Observation;
using exposure_glm::Portfolio;

inline std::string contract_id(std::size_t i) { return "C" + std::to_string(i + 1); }

inline Portfolio make_portfolio(const std::vector<double>& t, const std::vector<double>& y,
                                const std::vector<std::vector<double>>& x = {}) {
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < t.size(); ++i) {
        obs.push_back({contract_id(i), t[i], y[i], x.empty() ? std::vector<double>{} : x[i]});
    }
    return Portfolio(std::move(obs));
}

// t = (0.25, 0.5, 0.75, 1, 0.6), y = (0, 30, 10, 50, 12), one binary factor.
inline Portfolio toy_portfolio() {
    return make_portfolio({0.25, 0.5, 0.75, 1.0, 0.6}, {0, 30, 10, 50, 12}, {{0}, {1}, {0}, {1}, {1}});
}

// Two contracts, t = (0.5, 1), y = (5, 20).
inline Portfolio two_contracts() { return make_portfolio({0.5, 1.0}, {5, 20}); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct RandomPortfolioSpec {
    std::size_t n = 50;
    std::size_t q = 0;
    bool full_exposure = false;
};

// Mixed exposures in [0.05, 1] with at least one full-year contract, gamma-like
// positive losses with about 20% exact zeros, binary and continuous factors.
inline Portfolio random_portfolio(std::mt19937_64& rng, const RandomPortfolioSpec& spec) {
    for (;;) {
        std::vector<Observation> obs;
        for (std::size_t i = 0; i < spec.n; ++i) {
            Observation o;
            o.contract_id = contract_id(i);
            o.exposure = spec.full_exposure ? 1.0 : (i == 0 ? 1.0 : uniform(rng, 0.05, 1.0));
            std::vector<double> x;
            for (std::size_t j = 0; j < spec.q; ++j) {
                x.push_back(j % 2 == 0 ? (uniform(rng, 0, 1) < 0.4 ? 1.0 : 0.0) : uniform(rng, -1, 1));
            }
            double eta = 1.0;
            for (std::size_t j = 0; j < spec.q; ++j) eta += 0.3 * x[j];
            const bool zero = uniform(rng, 0, 1) < 0.2;
            o.loss_cost = zero ? 0.0 : o.exposure * std::exp(eta) * std::exponential_distribution<double>(1.0)(rng);
            o.covariates = std::move(x);
            obs.push_back(std::move(o));
        }
        try {
            return Portfolio(std::move(obs));
        } catch (const exposure_glm::RankDeficientError&) {
            // redraw
        }
    }
}

inline exposure_glm::CountData random_counts(std::mt19937_64& rng, std::size_t n, bool full_exposure,
                                             double zero_inflation) {
    for (;;) {
        std::vector<exposure_glm::CountObservation> obs;
        for (std::size_t i = 0; i < n; ++i) {
            exposure_glm::CountObservation o;
            o.contract_id = contract_id(i);
            o.exposure = full_exposure ? 1.0 : uniform(rng, 0.1, 1.0);
            const double x = uniform(rng, 0, 1) < 0.5 ? 1.0 : 0.0;
            const double mean = o.exposure * std::exp(0.2 + 0.5 * x);
            const bool structural_zero = uniform(rng, 0, 1) < zero_inflation;
            o.count = structural_zero ? 0 : std::poisson_distribution<int>(mean)(rng);
            o.covariates = {x};
            obs.push_back(std::move(o));
        }
        try {
            exposure_glm::CountData data(std::move(obs));
            if (data.counts().sum() > 0) return data;
        } catch (const exposure_glm::RankDeficientError&) {
        }
    }
}

}  // namespace fixtures
