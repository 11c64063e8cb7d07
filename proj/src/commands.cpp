#include <exposure_glm/commands.hpp>

#include <exposure_glm/balance.hpp>
#include <exposure_glm/claim_count.hpp>
#include <exposure_glm/estimators.hpp>
#include <exposure_glm/io.hpp>
#include <exposure_glm/simulate.hpp>
#include <exposure_glm/solver.hpp>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace exposure_glm::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json vec_json(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json mat_json(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_optional(const std::optional<double>& v) { return v ? io::format_number(*v) : "NA"; }

std::vector<WeightScheme> schemes_of(SchemeChoice choice) {
    switch (choice) {
        case SchemeChoice::Offset: return {WeightScheme::Offset};
        case SchemeChoice::Ratio: return {WeightScheme::Ratio};
        case SchemeChoice::Both: break;
    }
    return {WeightScheme::Offset, WeightScheme::Ratio};
}

FitConfig fit_config(const RunConfig& config) {
    FitConfig fc;
    fc.tolerance = config.tolerance;
    fc.max_iterations = config.max_iterations;
    fc.step_halving = config.step_halving;
    return fc;
}

Json family_json(const TweedieFamily& family) {
    return Json{{"p", family.power()},
                {"phi", family.dispersion()},
                {"phi_note", "phi is supplied, not estimated; it scales the reported covariance only"}};
}

Json fit_json(const FitResult& fit, const Portfolio& portfolio) {
    Json j;
    j["scheme"] = std::string(to_string(fit.scheme));
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["gradient_norm"] = fit.gradient_norm;
    j["quasi_loglik"] = fit.objective;
    j["beta"] = vec_json(fit.beta_hat);
    j["standard_errors"] = vec_json(fit.covariance.diagonal().cwiseSqrt());
    j["covariance"] = mat_json(fit.covariance);
    if (fit.converged && portfolio.losses().sum() > 0.0) {
        j["balance_factor"] = balance_factor(portfolio, fit);
    }
    Json trace = Json::array();
    for (const auto& rec : fit.trace) {
        trace.push_back(Json{{"iteration", rec.iteration},
                             {"beta", vec_json(rec.beta)},
                             {"quasi_loglik", rec.objective},
                             {"gradient_norm", rec.gradient_norm}});
    }
    j["trace"] = std::move(trace);
    return j;
}

fs::path write_json(const fs::path& dir, const std::string& name, const Json& j) {
    const fs::path path = dir / name;
    io::write_atomic(path, j.dump(2) + "\n");
    spdlog::info("wrote {}", path.string());
    return path;
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    io::write_atomic(path, content);
    spdlog::info("wrote {}", path.string());
    return path;
}

struct BothFits {
    FitResult offset;
    FitResult ratio;
};

BothFits fit_both(const Portfolio& portfolio, const TweedieFamily& family, const RunConfig& config) {
    BothFits out{fit(portfolio, WeightScheme::Offset, family, fit_config(config)),
                 fit(portfolio, WeightScheme::Ratio, family, fit_config(config))};
    for (const auto* f : {&out.offset, &out.ratio}) {
        spdlog::info("{} fit: converged={} iterations={} |X'DR|={:.3g}", to_string(f->scheme), f->converged,
                     f->iterations, f->gradient_norm);
        if (!f->converged) {
            throw Error("not_converged", std::string(to_string(f->scheme)) + " fit did not converge within " +
                                             std::to_string(config.max_iterations) + " iterations");
        }
    }
    return out;
}

std::string gaps_csv(const Portfolio& portfolio, const BothFits& fits) {
    const auto go = individual_gaps(portfolio, fits.offset);
    const auto gr = individual_gaps(portfolio, fits.ratio);
    std::string out = "contract_id,exposure,z,zeta_offset,zeta_ratio,gap_offset,gap_ratio\n";
    for (std::size_t i = 0; i < go.size(); ++i) {
        out += go[i].contract_id + "," + io::format_number(go[i].exposure) + "," +
               io::format_number(go[i].observed_z) + "," + io::format_number(go[i].fitted_zeta) + "," +
               io::format_number(gr[i].fitted_zeta) + "," + io::format_number(go[i].gap) + "," +
               io::format_number(gr[i].gap) + "\n";
    }
    return out;
}

std::string class_balance_csv(const Portfolio& portfolio, const BothFits& fits) {
    std::string out = "factor,level,loss_sum,premium_sum_offset,premium_sum_ratio,ratio_offset,ratio_ratio\n";
    for (std::size_t f = 0; f < portfolio.num_coefficients(); ++f) {
        const auto ro = class_report(portfolio, fits.offset, f);
        const auto rr = class_report(portfolio, fits.ratio, f);
        std::map<double, const ClassBalanceRow*> ratio_by_level;
        for (const auto& r : rr) ratio_by_level[r.level] = &r;
        for (const auto& r : ro) {
            const auto& other = *ratio_by_level.at(r.level);
            out += r.factor_name + "," + io::format_number(r.level) + "," + io::format_number(r.loss_sum) + "," +
                   io::format_number(r.premium_sum) + "," + io::format_number(other.premium_sum) + "," +
                   csv_optional(r.ratio) + "," + csv_optional(other.ratio) + "\n";
        }
    }
    return out;
}

Json groups_json(const Portfolio& portfolio) {
    Json a = Json::array();
    for (const auto& g : group_summaries(portfolio)) {
        a.push_back(Json{{"group", g.label},
                         {"contracts", g.contracts},
                         {"contract_share", g.contract_share},
                         {"mean_exposure", g.mean_exposure},
                         {"mean_loss", g.mean_loss},
                         {"loss_cost_reference", optional_json(g.loss_cost_reference)}});
    }
    return a;
}

Json header_json(const std::string& command) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("io_error", "cannot create output directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

void RunConfig::validate() const {
    if (!(p > 1.0 && p < 2.0)) throw DomainError("--p must lie in (1, 2)");
    if (!(phi > 0.0)) throw DomainError("--phi must be positive");
    if (!(tolerance > 0.0)) throw DomainError("--tol must be positive");
    if (max_iterations < 1) throw DomainError("--max-iter must be at least 1");
    if (!(zero_inflation >= 0.0 && zero_inflation < 1.0)) throw DomainError("--zero-inflation must lie in [0, 1)");
    const bool needs_input = command == Command::Fit || command == Command::Compare ||
                             command == Command::Balance || command == Command::Counts;
    if (needs_input && input.empty()) throw DomainError("--input is required for this command");
    if (needs_input && !fs::exists(input)) throw Error("io_error", "input file '" + input.string() + "' not found");
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw EmptyInputError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<fs::path> cmd_fit(const RunConfig& config) {
    config.validate();
    const Portfolio portfolio = io::ingest_csv(config.input);
    const TweedieFamily family(config.p, config.phi);
    spdlog::info("loaded {} contracts with {} covariates", portfolio.size(), portfolio.num_covariates());
    ensure_dir(config.output_dir);

    Json j = header_json("fit");
    j["family"] = family_json(family);
    j["n_contracts"] = portfolio.size();
    j["columns"] = portfolio.column_names();
    Json fits = Json::object();
    for (auto scheme : schemes_of(config.scheme)) {
        const FitResult r = fit(portfolio, scheme, family, fit_config(config));
        spdlog::info("{} fit: converged={} iterations={}", to_string(scheme), r.converged, r.iterations);
        fits[std::string(to_string(scheme))] = fit_json(r, portfolio);
    }
    j["fits"] = std::move(fits);
    return {write_json(config.output_dir, "fit.json", j)};
}

std::vector<fs::path> cmd_compare(const RunConfig& config) {
    config.validate();
    const Portfolio portfolio = io::ingest_csv(config.input);
    const TweedieFamily family(config.p, config.phi);
    ensure_dir(config.output_dir);
    const BothFits fits = fit_both(portfolio, family, config);
    const auto names = portfolio.column_names();

    std::string coeff = "covariate,beta_offset,beta_ratio,ratio\n";
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        const double bo = fits.offset.beta_hat(k);
        const double br = fits.ratio.beta_hat(k);
        coeff += names[j] + "," + io::format_number(bo) + "," + io::format_number(br) + "," +
                 (br != 0.0 ? io::format_number(bo / br) : std::string("NA")) + "\n";
    }

    std::vector<double> premium_ratios;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const Eigen::VectorXd x = portfolio.design().row(static_cast<Eigen::Index>(i)).transpose();
        premium_ratios.push_back(std::exp(x.dot(fits.offset.beta_hat) - x.dot(fits.ratio.beta_hat)));
    }
    std::string prem = "quantile,premium_ratio\n";
    for (double q : {0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0}) {
        prem += io::format_number(q) + "," + io::format_number(quantile(premium_ratios, q)) + "\n";
    }
    const auto above = std::count_if(premium_ratios.begin(), premium_ratios.end(), [](double r) { return r > 1.0; });

    Json j = header_json("compare");
    j["family"] = family_json(family);
    j["n_contracts"] = portfolio.size();
    j["columns"] = names;
    j["fits"] = Json{{"offset", fit_json(fits.offset, portfolio)}, {"ratio", fit_json(fits.ratio, portfolio)}};
    j["premium_ratio_summary"] =
        Json{{"share_above_one", static_cast<double>(above) / static_cast<double>(premium_ratios.size())},
             {"mean", std::accumulate(premium_ratios.begin(), premium_ratios.end(), 0.0) /
                          static_cast<double>(premium_ratios.size())}};
    j["portfolio_gap"] = Json{{"offset", portfolio_gap(individual_gaps(portfolio, fits.offset))},
                              {"ratio", portfolio_gap(individual_gaps(portfolio, fits.ratio))}};

    return {write_json(config.output_dir, "fit.json", j),
            write_text(config.output_dir, "coeff_ratios.csv", coeff),
            write_text(config.output_dir, "premium_ratios.csv", prem),
            write_text(config.output_dir, "gaps.csv", gaps_csv(portfolio, fits)),
            write_text(config.output_dir, "class_balance.csv", class_balance_csv(portfolio, fits))};
}

std::vector<fs::path> cmd_balance(const RunConfig& config) {
    config.validate();
    const Portfolio portfolio = io::ingest_csv(config.input);
    const TweedieFamily family(config.p, config.phi);
    ensure_dir(config.output_dir);
    const BothFits fits = fit_both(portfolio, family, config);

    Json j = header_json("balance");
    j["family"] = family_json(family);
    j["n_contracts"] = portfolio.size();
    j["total_loss"] = portfolio.losses().sum();
    for (const auto* f : {&fits.offset, &fits.ratio}) {
        const std::string key(to_string(f->scheme));
        j["schemes"][key] = Json{
            {"balance_factor", balance_factor(portfolio, *f)},
            {"portfolio_gap", portfolio_gap(individual_gaps(portfolio, *f))},
            {"expected_random_gap_plugin", expected_random_gap(portfolio, f->beta_hat, family, f->scheme)}};
    }
    const DominanceResult dom = covariance_dominance(portfolio, fits.ratio.beta_hat, family);
    j["covariance_dominance_at_ratio_fit"] = std::string(to_string(dom.verdict));
    j["groups"] = groups_json(portfolio);

    return {write_json(config.output_dir, "balance.json", j),
            write_text(config.output_dir, "gaps.csv", gaps_csv(portfolio, fits)),
            write_text(config.output_dir, "class_balance.csv", class_balance_csv(portfolio, fits))};
}

std::vector<fs::path> cmd_simulate(const RunConfig& config) {
    config.validate();
    ensure_dir(config.output_dir);

    if (config.mimic) {
        const SyntheticPortfolio data = gen_mimic_portfolio(config.share_midterm, config.n, config.seed);
        Json j = header_json("simulate");
        j["generator"] = data.generator;
        j["seed"] = data.seed;
        j["n_contracts"] = data.portfolio.size();
        j["share_midterm"] = config.share_midterm;
        j["groups"] = groups_json(data.portfolio);
        return {write_json(config.output_dir, "totals.json", j),
                write_text(config.output_dir, "portfolio.csv", io::portfolio_to_csv(data.portfolio))};
    }

    ScenarioConfig sc;
    sc.n = config.n;
    sc.scenario = parse_scenario(config.scenario);
    sc.heterogeneous = config.heterogeneous;
    sc.p = config.p;
    sc.seed = config.seed;
    sc.literal_decreasing = config.literal_decreasing;
    sc.covariate_mode = config.binomial_counts ? CovariateMode::BinomialCount : CovariateMode::Bernoulli;
    sc.fit = fit_config(config);
    const ExperimentReport report = run_gap_experiment(sc);

    std::string csv = "rank,exposure,gap_offset,gap_ratio\n";
    for (const auto& row : report.rows) {
        csv += std::to_string(row.rank) + "," + io::format_number(row.exposure) + "," +
               io::format_number(row.gap_offset) + "," + io::format_number(row.gap_ratio) + "\n";
    }
    Json j = header_json("simulate");
    j["generator"] = report.data.generator;
    j["seed"] = config.seed;
    j["n_contracts"] = config.n;
    j["scenario"] = std::string(to_string(sc.scenario));
    j["heterogeneous"] = sc.heterogeneous;
    j["p"] = sc.p;
    j["total_loss"] = report.total_loss;
    j["total_gap_offset"] = report.total_gap_offset;
    j["total_gap_ratio"] = report.total_gap_ratio;
    j["beta_offset"] = vec_json(report.fit_offset.beta_hat);
    j["beta_ratio"] = vec_json(report.fit_ratio.beta_hat);
    j["iterations"] = Json{{"offset", report.fit_offset.iterations}, {"ratio", report.fit_ratio.iterations}};

    return {write_text(config.output_dir, "simulation.csv", csv), write_json(config.output_dir, "totals.json", j),
            write_text(config.output_dir, "portfolio.csv", io::portfolio_to_csv(report.data.portfolio))};
}

std::vector<fs::path> cmd_counts(const RunConfig& config) {
    config.validate();
    const CountData data = io::ingest_count_csv(config.input);
    ensure_dir(config.output_dir);
    FitConfig fc = fit_config(config);
    const FitResult off = poisson_fit(data, WeightScheme::Offset, fc);
    const FitResult rat = poisson_fit(data, WeightScheme::Ratio, fc);
    const NonEquivalenceReport zip = zip_nonequivalence_check(data, config.zero_inflation);

    Json j = header_json("counts");
    j["n_contracts"] = data.size();
    for (const auto* f : {&off, &rat}) {
        j["poisson"][std::string(to_string(f->scheme))] =
            Json{{"beta", vec_json(f->beta_hat)}, {"converged", f->converged}, {"iterations", f->iterations}};
    }
    j["poisson"]["max_abs_difference"] = (off.beta_hat - rat.beta_hat).cwiseAbs().maxCoeff();
    Json probes = Json::array();
    for (std::size_t k = 0; k < zip.probes.size(); ++k) {
        probes.push_back(Json{{"beta", vec_json(zip.probes[k])}, {"loglik_difference", zip.differences[k]}});
    }
    j["zip"] = Json{{"zero_inflation", config.zero_inflation},
                    {"all_full_exposure", zip.all_full_exposure},
                    {"spread", zip.spread},
                    {"non_equivalent", zip.non_equivalent},
                    {"probes", std::move(probes)}};
    return {write_json(config.output_dir, "counts.json", j)};
}

std::vector<fs::path> run(const RunConfig& config) {
    switch (config.command) {
        case Command::Fit: return cmd_fit(config);
        case Command::Compare: return cmd_compare(config);
        case Command::Simulate: return cmd_simulate(config);
        case Command::Balance: return cmd_balance(config);
        case Command::Counts: return cmd_counts(config);
    }
    throw DomainError("unknown command");
}

std::string error_json(const std::exception& error) {
    Json j = header_json("error");
    Json e;
    if (const auto* lib = dynamic_cast<const Error*>(&error)) {
        e["kind"] = lib->kind();
        if (const auto* pe = dynamic_cast<const ParseError*>(&error)) {
            e["row"] = pe->row();
            e["column"] = pe->column();
        }
        if (const auto* re = dynamic_cast<const RankDeficientError*>(&error)) e["columns"] = re->columns();
    } else {
        e["kind"] = "internal_error";
    }
    e["message"] = error.what();
    j["error"] = std::move(e);
    return j.dump();
}

}  // namespace exposure_glm::cli
