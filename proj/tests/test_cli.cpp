#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rmp/acceptance.hpp"
#include "rmp/commands.hpp"

using namespace rmp;
using namespace rmp::cli;
using Json = nlohmann::json;
using std::numbers::ln2;

namespace {

const std::string kConfigs = RMP_CONFIG_DIR;

ExperimentConfig config_for(const std::string& name) { return ExperimentConfig{load_distribution(kConfigs + "/" + name)}; }

struct ProcessResult {
    int exit_code;
    std::string out;
};

// Runs the built executable, capturing stdout; stderr is discarded.
ProcessResult run_rmp(const std::string& args) {
    const std::string cmd = std::string(RMP_EXE) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    while (const std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("rmp_test_" + name);
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST(Estimate, ConstantWithFewSamples) {
    ExperimentConfig cfg = config_for("constant111.json");
    cfg.samples = 10;
    const Json j = Json::parse(cmd_estimate(cfg).json);
    EXPECT_EQ(j["command"], "estimate");
    EXPECT_EQ(j["seed"], 0);
    EXPECT_DOUBLE_EQ(j["lambda"]["value"].get<double>(), ln2);
    EXPECT_EQ(j["sigma2"]["value"].get<double>(), 0.0);
    EXPECT_TRUE(j["diagnostics"].is_null());
    EXPECT_TRUE(j["closed_form"].is_null());
}

TEST(Estimate, CauchyMonteCarlo) {
    ExperimentConfig cfg = config_for("cauchy.json");
    cfg.samples = 1000000;
    cfg.seed = 7;
    const Json j = Json::parse(cmd_estimate(cfg).json);
    EXPECT_EQ(j["method"], "monte-carlo");
    EXPECT_EQ(j["seed"], 7);
    EXPECT_NEAR(j["lambda"]["value"].get<double>(), ln2, 3 * j["lambda"]["std_error"].get<double>());
    EXPECT_DOUBLE_EQ(j["closed_form"]["lambda"].get<double>(), ln2);
    EXPECT_TRUE(j["diagnostics"].is_object());
    EXPECT_TRUE(j["ladder"].contains("c1_std_error"));
}

TEST(Estimate, BinaryExactPath) {
    ExperimentConfig cfg = config_for("binary_2_3_p05.json");
    cfg.exact = true;
    const Json j = Json::parse(cmd_estimate(cfg).json);
    EXPECT_EQ(j["method"], "exact");
    EXPECT_FALSE(j["lambda"].contains("std_error"));
    const auto printed = acceptance::printed_binary_formulas(2, 3, 0.5);
    EXPECT_NEAR(j["lambda"]["value"].get<double>(), printed.lambda, 1e-12);
    EXPECT_NEAR(j["sigma2"]["value"].get<double>(), j["closed_form"]["sigma2"].get<double>(), 1e-12);
}

TEST(Estimate, ExactRequiresFiniteSupport) {
    ExperimentConfig cfg = config_for("cauchy.json");
    cfg.exact = true;
    try {
        cmd_estimate(cfg);
        FAIL() << "expected CommandError";
    } catch (const CommandError& e) {
        EXPECT_EQ(e.exit_code(), 1);
    }
}

TEST(Estimate, MinusInfinityIsEncodedAsString) {
    const auto path = temp_file("cancel.json", R"({"family":"DiscreteAtoms","atoms":[[[2,1,1],0.5],[[1,-2,3],0.5]]})");
    ExperimentConfig cfg{load_distribution(path.string())};
    cfg.exact = true;
    const Json exact = Json::parse(cmd_estimate(cfg).json);
    EXPECT_EQ(exact["lambda"]["value"], "-inf");
    EXPECT_TRUE(exact["sigma2"]["value"].is_null());
    cfg.exact = false;
    cfg.samples = 1000;
    const Json mc = Json::parse(cmd_estimate(cfg).json);
    EXPECT_EQ(mc["lambda"]["value"], "-inf");
    EXPECT_EQ(mc["lambda"]["std_error"], "inf");
    EXPECT_GT(mc["lambda"]["minus_inf_events"].get<int>(), 0);
    std::filesystem::remove(path);
}

TEST(Clt, ConstantExactSource) {
    ExperimentConfig cfg = config_for("constant111.json");
    cfg.n = 100;
    cfg.chains = 50;
    cfg.source = ValueSource::Exact;
    const CommandOutput out = cmd_clt(cfg);
    const Json j = Json::parse(out.json);
    EXPECT_EQ(j["empirical_var"].get<double>(), 0.0);
    EXPECT_FALSE(j["ks_defined"].get<bool>());
    EXPECT_TRUE(j["ks_distance"].is_null());
    EXPECT_EQ(j["histogram"].size(), 40u);
}

TEST(Clt, ExponentialClosedForm) {
    ExperimentConfig cfg = config_for("exp_theta1.json");
    cfg.n = 10000;
    cfg.chains = 2000;
    cfg.seed = 3;
    const Json j = Json::parse(cmd_clt(cfg).json);
    EXPECT_LE(j["ks_distance"].get<double>(), 0.0437);
}

TEST(Clt, UniformVarianceNearFiveQuarters) {
    ExperimentConfig cfg = config_for("uniform_ab1.json");
    cfg.n = 10000;
    cfg.chains = 2000;
    const Json j = Json::parse(cmd_clt(cfg).json);
    EXPECT_EQ(j["sigma2_used"].get<double>(), 1.25);
    EXPECT_LE(std::abs(j["empirical_var"].get<double>() - 1.25), 0.125);
}

TEST(Clt, HistogramCsvFormat) {
    ExperimentConfig cfg = config_for("exp_theta1.json");
    cfg.n = 50;
    cfg.chains = 100;
    const CommandOutput out = cmd_clt(cfg);
    std::istringstream csv(out.histogram_csv);
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "bin_left,bin_right,count");
    int rows = 0;
    long total = 0;
    while (std::getline(csv, line)) {
        double left = 0, right = 0;
        long count = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%ld", &left, &right, &count), 3) << line;
        EXPECT_LT(left, right);
        total += count;
        ++rows;
    }
    EXPECT_EQ(rows, 40);
    EXPECT_EQ(total, 100);
    EXPECT_EQ(csv_real(0.1), "0.10000000000000001");
}

TEST(Clt, UnavailableSourceExitsTwo) {
    for (const auto& [file, source] : {std::pair{"hill_theta1.json", ValueSource::ClosedForm},
                                       std::pair{"cauchy.json", ValueSource::Exact}}) {
        ExperimentConfig cfg = config_for(file);
        cfg.n = 100;
        cfg.chains = 20;
        cfg.source = source;
        try {
            cmd_clt(cfg);
            FAIL() << file;
        } catch (const CommandError& e) {
            EXPECT_EQ(e.exit_code(), 2) << file;
        }
    }
}

TEST(Degeneracy, Verdicts) {
    EXPECT_TRUE(Json::parse(cmd_degeneracy(config_for("constant111.json")).json)["is_degenerate_candidate"].get<bool>());
    EXPECT_TRUE(
        Json::parse(cmd_degeneracy(config_for("telescoping_two_atom.json")).json)["is_degenerate_candidate"].get<bool>());
    const Json b = Json::parse(cmd_degeneracy(config_for("binary_2_3_p05.json")).json);
    EXPECT_FALSE(b["is_degenerate_candidate"].get<bool>());
    EXPECT_GT(b["sigma2"].get<double>(), 0.0);
    EXPECT_TRUE(b["lambda_atom_check"].contains("residual"));
    EXPECT_EQ(b["candidates"].size(), 2u);
}

TEST(Degeneracy, ContinuousFamilyIsAConfigurationError) {
    try {
        cmd_degeneracy(config_for("cauchy.json"));
        FAIL();
    } catch (const CommandError& e) {
        EXPECT_EQ(e.exit_code(), 1);
    }
}

TEST(LoadDistribution, ErrorsExitOne) {
    try {
        load_distribution("/nonexistent/dist.json");
        FAIL();
    } catch (const CommandError& e) {
        EXPECT_EQ(e.exit_code(), 1);
    }
    const auto bad = temp_file("bad.json", R"({"family":"DiscreteAtoms","atoms":[[[0,1,1],1.0]]})");
    try {
        load_distribution(bad.string());
        FAIL();
    } catch (const CommandError& e) {
        EXPECT_EQ(e.exit_code(), 1);
        EXPECT_NE(std::string(e.what()).find("a must be nonzero"), std::string::npos);
    }
    std::filesystem::remove(bad);
}

TEST(Acceptance, CorruptedOracleIsDetected) {
    acceptance::Options options;
    options.quick = true;
    options.closed_form = [](const DistributionSpec& spec) {
        ClosedFormValues v = closed_form(spec);
        v.lambda += 0.05;
        return v;
    };
    for (int id : {1, 2, 3}) EXPECT_FALSE(acceptance::run_criterion(id, options).passed) << "criterion " << id;
}

TEST(Executable, OutputAndExitCodes) {
    const ProcessResult est = run_rmp("estimate --dist " + kConfigs + "/constant111.json --samples 10");
    EXPECT_EQ(est.exit_code, 0);
    EXPECT_DOUBLE_EQ(Json::parse(est.out)["lambda"]["value"].get<double>(), ln2);

    EXPECT_EQ(run_rmp("degeneracy --dist " + kConfigs + "/cauchy.json").exit_code, 1);
    EXPECT_EQ(run_rmp("clt --dist " + kConfigs + "/hill_theta1.json --n 100 --chains 20 --source closed-form").exit_code,
              2);
    EXPECT_EQ(run_rmp("estimate --dist /nonexistent.json").exit_code, 1);
    EXPECT_EQ(run_rmp("clt --dist " + kConfigs + "/cauchy.json --source bogus").exit_code, 1);
    EXPECT_EQ(run_rmp("frobnicate").exit_code, 1);
}

TEST(Executable, WritesResultAndHistogramFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "rmp_cli_out";
    std::filesystem::create_directories(dir);
    const auto out = dir / "clt.json";
    const ProcessResult r = run_rmp("clt --dist " + kConfigs + "/exp_theta1.json --n 50 --chains 100 --source closed-form --out " +
                          out.string());
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream j(out);
    EXPECT_EQ(Json::parse(j)["m_chains"], 100);
    EXPECT_TRUE(std::filesystem::exists(dir / "clt.json.hist.csv"));
    std::filesystem::remove_all(dir);
}

TEST(Executable, ThreadCountDoesNotChangeOutput) {
    const std::string base = "clt --dist " + kConfigs + "/binary_2_3_p05.json --n 200 --chains 200 --source mc "
                             "--samples 20000 --seed 5 --threads ";
    const ProcessResult one = run_rmp(base + "1");
    const ProcessResult many = run_rmp(base + "6");
    EXPECT_EQ(one.exit_code, 0);
    EXPECT_EQ(one.out, many.out);
}
