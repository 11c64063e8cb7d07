#include <exposure_glm/commands.hpp>
#include <exposure_glm/errors.hpp>
#include <exposure_glm/io.hpp>

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace exposure_glm;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("exposure_glm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        io::write_atomic(dir_ / "toy.csv",
                         "contract_id,exposure,loss_cost,x1\nA,0.25,0,0\nB,0.5,30,1\nC,0.75,10,0\nD,1.0,50,1\nE,0.6,12,1\n");
        io::write_atomic(dir_ / "counts.csv",
                         "contract_id,exposure,count,x1\nA,0.5,1,0\nB,1,3,1\nC,0.25,0,0\nD,0.8,2,1\nE,0.3,0,1\n");
    }
    void TearDown() override { fs::remove_all(dir_); }

    cli::RunConfig config(cli::Command c, const std::string& input = "toy.csv") {
        cli::RunConfig cfg;
        cfg.command = c;
        if (!input.empty()) cfg.input = dir_ / input;
        cfg.output_dir = dir_ / "out";
        cfg.p = 1.5;
        return cfg;
    }
    nlohmann::json read_json(const std::string& name) { return nlohmann::json::parse(io::read_file(dir_ / "out" / name)); }

    fs::path dir_;
};

}  // namespace

TEST(Quantile, TypeSeven) {
    EXPECT_DOUBLE_EQ(cli::quantile({3, 1, 2, 4}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(cli::quantile({3, 1, 2, 4}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(cli::quantile({3, 1, 2, 4}, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(cli::quantile({0, 10}, 0.05), 0.5);
    EXPECT_THROW(cli::quantile({}, 0.5), EmptyInputError);
}

TEST_F(CliTest, FitWritesBothSchemes) {
    const auto files = cli::run(config(cli::Command::Fit));
    ASSERT_EQ(files.size(), 1u);
    const auto j = read_json("fit.json");
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_NEAR(j["fits"]["offset"]["beta"][1].get<double>(), 1.63790886, 1e-8);
    EXPECT_NEAR(j["fits"]["ratio"]["beta"][0].get<double>(), std::log(10.0), 1e-9);
    EXPECT_TRUE(j["fits"]["ratio"]["converged"].get<bool>());
}

TEST_F(CliTest, FitSingleScheme) {
    auto cfg = config(cli::Command::Fit);
    cfg.scheme = cli::SchemeChoice::Ratio;
    cli::run(cfg);
    const auto j = read_json("fit.json");
    EXPECT_FALSE(j["fits"].contains("offset"));
    EXPECT_TRUE(j["fits"].contains("ratio"));
}

TEST_F(CliTest, CompareAndBalanceArtifacts) {
    EXPECT_EQ(cli::run(config(cli::Command::Compare)).size(), 5u);
    const std::string coeff = io::read_file(dir_ / "out" / "coeff_ratios.csv");
    EXPECT_EQ(coeff.substr(0, coeff.find('\n')), "covariate,beta_offset,beta_ratio,ratio");
    EXPECT_EQ(cli::run(config(cli::Command::Balance)).size(), 3u);
    const auto b = read_json("balance.json");
    EXPECT_NEAR(b["schemes"]["ratio"]["balance_factor"].get<double>(), 1.0, 1e-9);
    EXPECT_EQ(b["covariance_dominance_at_ratio_fit"], "strictly_dominant");
}

TEST_F(CliTest, SimulateAndMimic) {
    auto cfg = config(cli::Command::Simulate, "");
    cfg.n = 50;
    EXPECT_EQ(cli::run(cfg).size(), 3u);
    const auto t = read_json("totals.json");
    EXPECT_GT(t["total_gap_offset"].get<double>(), 0.0);
    cfg.mimic = true;
    cfg.n = 300;
    EXPECT_EQ(cli::run(cfg).size(), 2u);
}

TEST_F(CliTest, Counts) {
    cli::run(config(cli::Command::Counts, "counts.csv"));
    const auto j = read_json("counts.json");
    EXPECT_LT(j["poisson"]["max_abs_difference"].get<double>(), 1e-8);
    EXPECT_TRUE(j["zip"]["non_equivalent"].get<bool>());
}

TEST_F(CliTest, ConfigErrors) {
    auto cfg = config(cli::Command::Fit);
    cfg.p = 2.0;
    EXPECT_THROW(cli::run(cfg), DomainError);
    cfg = config(cli::Command::Fit, "missing.csv");
    EXPECT_THROW(cli::run(cfg), Error);
    cfg = config(cli::Command::Fit);
    cfg.input.clear();
    EXPECT_THROW(cli::run(cfg), DomainError);
}

TEST(ErrorJson, CarriesKindAndLocation) {
    const auto j = nlohmann::json::parse(cli::error_json(ParseError(4, "exposure", "bad")));
    EXPECT_EQ(j["error"]["kind"], "parse_error");
    EXPECT_EQ(j["error"]["row"], 4);
    EXPECT_EQ(j["error"]["column"], "exposure");
    const auto r = nlohmann::json::parse(cli::error_json(RankDeficientError("dep", {"a", "b"})));
    EXPECT_EQ(r["error"]["columns"].size(), 2u);
    const auto o = nlohmann::json::parse(cli::error_json(std::runtime_error("x")));
    EXPECT_EQ(o["error"]["kind"], "internal_error");
}
