// Command-line front end: JSON specs, exit codes, output stability.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <bordercurve/cli.hpp>

using namespace bordercurve;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "bordercurve");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("bordercurve_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Environment parse(const std::string& text) { return parse_environment(nlohmann::json::parse(text), "."); }

const std::string kForms = "samples/forms/";
const std::string kEnvs = "samples/envs/";

}  // namespace

TEST(EnvJson, ParsesFamiliesAndCounts) {
    const Environment e = parse(R"({"bidders": [
        {"family": "linear", "dist": {"kind": "power-mvv", "beta": 0.5}},
        {"family": "ev-power", "beta": 0.7, "count": 2},
        {"family": "ev-h", "gamma": 2.5},
        {"family": "cra", "ce": {"kind": "gul", "alpha": 1.5}, "count": 3}]})");
    EXPECT_EQ(e.size(), 7u);
    EXPECT_EQ(e.bidder(1).family, e.bidder(2).family);
    EXPECT_EQ(parse(R"({"bidders": [{"family": "linear", "count": 1000}]})").size(), 1000u);
}

TEST(EnvJson, FlatSpellingMatchesNested) {
    const Environment flat = parse(R"({"bidders": [
        {"family": "linear", "dist": "power-mvv", "beta": 0.5},
        {"family": "cra", "g": "gul", "alpha": 1.5, "dist": "uniform"}]})");
    const Environment nested = parse(R"({"bidders": [
        {"family": "linear", "dist": {"kind": "power-mvv", "beta": 0.5}},
        {"family": "cra", "ce": {"kind": "gul", "alpha": 1.5}}]})");
    ASSERT_EQ(flat.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i)
        for (double u : {0.1, 0.5, 0.9}) EXPECT_EQ(flat.R(i, u, 1.0), nested.R(i, u, 1.0));
    EXPECT_THROW(parse(R"({"bidders": [{"family": "linear", "beta": 0.5}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "cra", "g": "quadratic", "alpha": 1,
                                         "ce": {"kind": "quadratic", "alpha": 1}}]})"),
                 InputError);
}

TEST(EnvJson, RejectsBadInput) {
    EXPECT_THROW(parse(R"({"bidders": [{"family": "linear", "colour": 1}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [], "extra": 1})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "linear", "count": 0}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "linear", "count": 1001}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "linear", "count": 1.5}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "ev-power"}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "ev-power", "beta": "x"}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "auction"}]})"), InputError);
    EXPECT_THROW(parse(R"({"bidders": [{"family": "cra", "ce": {"kind": "cubic", "alpha": 1}}]})"), InputError);
    EXPECT_THROW(load_environment("samples/envs/missing.json"), InputError);
}

TEST(EnvJson, BundledSamplesLoad) {
    for (const auto& entry : fs::directory_iterator(kEnvs)) EXPECT_NO_THROW(load_environment(entry.path())) << entry.path();
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"feasible"}).code, 2);
    EXPECT_EQ(run({"--tol", "-1", "verify"}).code, 2);
    const auto missing = run({"feasible", "no/such.csv"});
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("input error"), std::string::npos);
    EXPECT_EQ(run({"revenue", kEnvs + "ev_power_asymmetric.json", kForms + "value_quantile.csv",
                   kForms + "value_quantile.csv"})
                  .code,
              2);
}

TEST(Cli, FeasibleVerdicts) {
    const auto bad = run({"--json", "feasible", kForms + "power_a05.csv", kForms + "power_a06.csv"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(nlohmann::json::parse(bad.out)["status"], "infeasible");
    const auto edge = run({"--json", "feasible", kForms + "power_a05.csv", kForms + "power_a05.csv"});
    EXPECT_EQ(edge.code, 0);
    EXPECT_EQ(nlohmann::json::parse(edge.out)["status"], "boundary-extremal");
    const auto one = run({"--json", "feasible", kForms + "power_a05.csv"});
    EXPECT_EQ(one.code, 0);
    EXPECT_EQ(nlohmann::json::parse(one.out)["status"], "feasible");
}

TEST(Cli, ExtremalVerdicts) {
    EXPECT_EQ(run({"extremal", kForms + "staircase_1.csv", kForms + "staircase_2.csv"}).code, 0);
    EXPECT_EQ(run({"extremal", kForms + "power_a05.csv"}).code, 1);
    const auto j = nlohmann::json::parse(
        run({"--json", "extremal", kForms + "power_a05.csv", kForms + "power_a06.csv"}).out);
    EXPECT_FALSE(j["feasible"].get<bool>());
}

TEST(Cli, CurveCsvRoundTrip) {
    const fs::path d = scratch("curve");
    ASSERT_EQ(run({"--out", d.string(), "--grid", "101", "curve", kForms + "staircase_1.csv",
                   kForms + "staircase_2.csv"})
                  .code,
              0);
    std::ifstream in(d / "curve.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.rfind("s,", 0), 0u);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const double B = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_NEAR(B, 1.0, 1e-9) << line;
    }
    EXPECT_EQ(rows, 101u);
}

TEST(Cli, SolveWritesOutputs) {
    const fs::path d = scratch("solve");
    const auto r = run({"--out", d.string(), "solve", kEnvs + "cra_two_neutral_one_averse.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto summary = nlohmann::json::parse(slurp(d / "summary.json"));
    EXPECT_NEAR(summary["T"].get<double>(), std::log(12.0), 1e-6);
    EXPECT_EQ(summary["regime"], "fractional");
    EXPECT_LE(summary["mre_residual"].get<double>(), 1e-7);
    EXPECT_GE(summary["revenue"].get<double>(), summary["revenue_myerson"].get<double>() - 1e-9);
    // Every allocation row parses and fractions stay in [0,1].
    std::ifstream in(d / "allocation.csv");
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        const double r_frac = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_GE(r_frac, 0.0);
        EXPECT_LE(r_frac, 1.0);
    }
    EXPECT_GT(rows, 0u);
    // path.csv reloads as delta paths with the budget identity.
    std::ifstream pin(d / "path.csv");
    std::getline(pin, line);
    while (std::getline(pin, line)) {
        std::stringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        ASSERT_EQ(v.size(), 8u);
        EXPECT_NEAR(v[2] + v[3] + v[4], v[0], 1e-9 * std::max(1.0, v[0]));
    }
}

TEST(Cli, OutputIsReproducible) {
    const std::vector<std::vector<std::string>> cmds = {
        {"--json", "feasible", kForms + "staircase_1.csv", kForms + "staircase_2.csv"},
        {"curve", kForms + "power_a05.csv", kForms + "power_a06.csv"},
        {"--json", "solve", kEnvs + "ev_power_asymmetric.json"},
        {"--samples", "20000", "--seed", "7", "simulate", kEnvs + "ev_power_asymmetric.json"},
        {"revenue", kEnvs + "linear_uniform_pair.json", kForms + "power_a05.csv", kForms + "power_a05.csv"},
    };
    for (const auto& c : cmds) {
        const auto a = run(c), b = run(c);
        EXPECT_EQ(a.code, 0) << c.back() << a.err;
        EXPECT_EQ(a.out, b.out) << c.back();
    }
}

TEST(Cli, SimulateMatchesExact) {
    const auto r = run({"--samples", "200000", "--seed", "3", "--grid", "21", "simulate",
                        kEnvs + "ev_power_asymmetric.json"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::stringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "bidder,u,x_exact,x_mc,stderr");
    std::size_t rows = 0, inside = 0;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
        ASSERT_EQ(v.size(), 5u);
        ++rows;
        if (std::abs(v[2] - v[3]) <= 4.0 * v[4] + 1e-5) ++inside;  // floor: cells rarer than 1/N
    }
    EXPECT_EQ(rows, 42u);
    EXPECT_GE(inside, 41u);
}

TEST(Cli, VerifyPasses) {
    const auto r = run({"verify"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}
