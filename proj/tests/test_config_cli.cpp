#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "divtest/errors.hpp"
#include "divtest/experiment_config.hpp"
#include "divtest/toml_lite.hpp"

using namespace divtest;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const std::string& extra_env = "") {
    const fs::path out = fs::temp_directory_path() / "divtest_cli_out.txt";
    std::string cmd = extra_env + " " + std::string(DIVTEST_CLI_PATH) + " " + args + " > " +
                      out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / name; }

}  // namespace

TEST_CASE("toml subset parsing") {
    const TomlTable t = TomlTable::parse(R"(
# experiment
null_dist = [0.7, 0.3]
divergence = "kl"
eps = 0.05
n_grid = [100, 316, 1000]
trials = 20000
exact = true
label = "a \"quoted\" name"
)");
    CHECK(t.get_double_array("null_dist") == std::vector<double>{0.7, 0.3});
    CHECK(t.get_string("divergence") == "kl");
    CHECK(t.get_double("eps") == 0.05);
    CHECK(t.get_int_array("n_grid") == std::vector<std::int64_t>{100, 316, 1000});
    CHECK(t.get_int("trials") == 20000);
    CHECK(t.get_bool("exact"));
    CHECK(t.get_string("label") == "a \"quoted\" name");

    CHECK_THROWS_AS(TomlTable::parse("[section]\nx = 1"), error);
    CHECK_THROWS_AS(TomlTable::parse("x = 1\nx = 2"), error);
    CHECK_THROWS_AS(TomlTable::parse("x = 1e"), error);
    CHECK_THROWS_AS(TomlTable::parse("x = \"unterminated"), error);
    CHECK_THROWS_AS(TomlTable::parse("x = [1, 2"), error);
    CHECK_THROWS_AS(TomlTable::parse("x = [1, \"a\"]"), error);
    CHECK_THROWS_AS(TomlTable::parse("x 1"), error);
}

TEST_CASE("experiment config validation names the field") {
    ExperimentConfig cfg;
    cfg.null_dist = {0.7, 0.3};
    cfg.alt_dist = {0.5, 0.5};
    cfg.n_grid = {100};

    CHECK_NOTHROW(cfg.validate(true));

    auto expect_field = [](ExperimentConfig c, bool need_alt, const std::string& field) {
        try {
            c.validate(need_alt);
            FAIL_CHECK("expected config_error for field " << field);
        } catch (const config_error& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };

    ExperimentConfig bad = cfg;
    bad.eps = 1.5;
    expect_field(bad, true, "eps");
    bad = cfg;
    bad.n_grid = {};
    expect_field(bad, true, "n_grid");
    bad = cfg;
    bad.n_grid = {100, 100};
    expect_field(bad, true, "n_grid");
    bad = cfg;
    bad.alt_dist = {0.7, 0.3};
    expect_field(bad, true, "alt_dist");
    bad = cfg;
    bad.null_dist = {0.6, 0.3};
    expect_field(bad, true, "null_dist");
    bad = cfg;
    bad.mode = "sometimes";
    expect_field(bad, true, "mode");
    bad = cfg;
    bad.divergence = "hellinger";
    expect_field(bad, true, "divergence");
    bad = cfg;
    bad.divergence = "renyi";
    bad.alpha = -1.0;
    expect_field(bad, true, "alpha");
    bad = cfg;
    bad.margin = 0.05;
    expect_field(bad, true, "margin");

    ExperimentConfig from_toml;
    CHECK_THROWS_AS(from_toml.apply_toml(TomlTable::parse("unknown_key = 1")), config_error);
}

TEST_CASE("cli calibrate reproduces the 5-type instance") {
    const fs::path csv = temp_file("cli_cal.csv");
    const RunResult r = run_cli("calibrate --null_dist 0.5,0.5 --eps 0.3 --n_grid 4 --output_path " +
                                csv.string());
    REQUIRE(r.exit_code == 0);
    const std::string body = slurp(csv);
    CHECK(body.find("n,r_star,achieved_type1,asymptotic_r") == 0);  // header row
    CHECK(body.find("0.41197960825054") != std::string::npos);
    CHECK(body.find("0.125") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    // invalid eps -> 2 with a diagnostic naming the field
    RunResult r = run_cli("calibrate --null_dist 0.5,0.5 --eps 1.5 --n_grid 4 --output_path " +
                          temp_file("x.csv").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("eps") != std::string::npos);

    // empty n_grid -> 2
    r = run_cli("calibrate --null_dist 0.5,0.5 --eps 0.3 --output_path " +
                temp_file("x.csv").string());
    CHECK(r.exit_code == 2);

    // P = Q in config -> 2
    r = run_cli("optimizer-check --null_dist 0.5,0.5 --alt_dist 0.5,0.5 --n_grid 100 "
                "--output_path " +
                temp_file("x.json").string());
    CHECK(r.exit_code == 2);

    // radius beyond the tau guard -> 4
    r = run_cli("optimizer-check --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --r_tilde 9.0 "
                "--n_grid 100 --output_path " +
                temp_file("x.json").string());
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("RadiusTooLarge") != std::string::npos);

    // enumeration budget (k = 5, large n) -> 3
    r = run_cli("errors --null_dist 0.2,0.2,0.2,0.2,0.2 --alt_dist 0.3,0.2,0.2,0.15,0.15 "
                "--eps 0.05 --n_grid 300 --output_path " +
                temp_file("x.csv").string());
    CHECK(r.exit_code == 3);

    // verify-asymptotics needs at least 4 grid points -> 2
    r = run_cli("verify-asymptotics --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 "
                "--n_grid 100 --output_path " +
                temp_file("x.csv").string());
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli verify-asymptotics passes on the flagship instance and fails a negative control") {
    const fs::path csv = temp_file("cli_va.csv");
    RunResult r = run_cli(
        "verify-asymptotics --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 "
        "--n_grid 100,316,1000,3162,10000 --output_path " +
        csv.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    CHECK(slurp(csv).find("residual_over_sqrt_n") != std::string::npos);
    const std::string report = slurp(fs::path(csv.string() + ".report.json"));
    CHECK(report.find("\"schema_version\"") != std::string::npos);
    CHECK(report.find("\"verdict\": \"PASS\"") != std::string::npos);
    CHECK(report.find("\"config\"") != std::string::npos);

    // deliberately wrong chi-squared dof makes the prediction miss at sqrt(n) order
    r = run_cli(
        "verify-asymptotics --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 "
        "--n_grid 100,316,1000,3162,10000 --dof_override 4 --output_path " +
        temp_file("cli_va_bad.csv").string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("FAIL") != std::string::npos);
}

TEST_CASE("cli outputs are byte-identical for identical config and seed") {
    const fs::path a = temp_file("det_a.csv"), b = temp_file("det_b.csv");
    const std::string base =
        "errors --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 --n_grid 50 --mode both "
        "--trials 5000 --seed 11 --output_path ";
    REQUIRE(run_cli(base + a.string()).exit_code == 0);
    REQUIRE(run_cli(base + b.string()).exit_code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).find("type2_mc") != std::string::npos);
}

TEST_CASE("cli config file + flag override + seed environment variable") {
    const fs::path cfg_path = temp_file("exp.toml");
    {
        std::ofstream out(cfg_path);
        out << "null_dist = [0.5, 0.5]\n"
               "alt_dist = [0.7, 0.3]\n"
               "divergence = \"kl\"\n"
               "eps = 0.3\n"
               "n_grid = [4]\n"
               "output_path = \"" << temp_file("cfg_out.csv").string() << "\"\n";
    }
    RunResult r = run_cli("calibrate --config " + cfg_path.string());
    CHECK(r.exit_code == 0);
    CHECK(slurp(temp_file("cfg_out.csv")).find("0.41197960825054") != std::string::npos);

    // flag overrides the file value: eps = 1.5 must now fail validation
    r = run_cli("calibrate --config " + cfg_path.string() + " --eps 1.5");
    CHECK(r.exit_code == 2);

    // DIVTEST_SEED is the seed of last resort; the --seed flag beats it
    const fs::path m1 = temp_file("env_a.csv"), m2 = temp_file("env_b.csv"), m3 = temp_file("env_c.csv");
    const std::string mc =
        "errors --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 --n_grid 40 --mode mc "
        "--trials 2000 --output_path ";
    REQUIRE(run_cli(mc + m1.string(), "DIVTEST_SEED=123").exit_code == 0);
    REQUIRE(run_cli(mc + m2.string(), "DIVTEST_SEED=123").exit_code == 0);
    REQUIRE(run_cli(mc + m3.string() + " --seed 999", "DIVTEST_SEED=123").exit_code == 0);
    CHECK(slurp(m1) == slurp(m2));
    CHECK(slurp(m1) != slurp(m3));

    // an explicit config seed (even 0) beats the environment fallback
    const fs::path seed_cfg = temp_file("seed.toml");
    {
        std::ofstream out(seed_cfg);
        out << "seed = 0\n";
    }
    const fs::path m4 = temp_file("env_d.csv"), m5 = temp_file("env_e.csv");
    REQUIRE(run_cli(mc + m4.string() + " --config " + seed_cfg.string(),
                    "DIVTEST_SEED=123").exit_code == 0);
    REQUIRE(run_cli(mc + m5.string() + " --config " + seed_cfg.string()).exit_code == 0);
    CHECK(slurp(m4) == slurp(m5));
    CHECK(slurp(m4) != slurp(m1));
}

TEST_CASE("cli predict and berry-esseen") {
    const fs::path csv = temp_file("cli_pred.csv");
    RunResult r = run_cli(
        "predict --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --eps 0.05 --n_grid 1000 "
        "--output_path " +
        csv.string());
    CHECK(r.exit_code == 0);
    std::string body = slurp(csv);
    CHECK(body.find("div_predicted") != std::string::npos);
    CHECK(body.find("58.217436") != std::string::npos);
    CHECK(body.find("62.086522") != std::string::npos);

    const fs::path be = temp_file("cli_be.csv");
    r = run_cli("berry-esseen --null_dist 0.5,0.5 --n_grid 1,50 --output_path " + be.string());
    CHECK(r.exit_code == 0);
    body = slurp(be);
    CHECK(body.find("sqrt_n_sup") != std::string::npos);
    CHECK(body.find("0.7609681085504") != std::string::npos);  // n=1 sup by hand
}

TEST_CASE("cli optimizer-check report") {
    const fs::path json_path = temp_file("opt_report.json");
    const RunResult r = run_cli(
        "optimizer-check --null_dist 0.7,0.3 --alt_dist 0.5,0.5 --r_tilde 0.01 --n_grid 100 "
        "--output_path " +
        json_path.string());
    CHECK(r.exit_code == 0);
    const std::string body = slurp(json_path);
    CHECK(body.find("\"all_ok\": true") != std::string::npos);
    CHECK(body.find("\"schema_version\"") != std::string::npos);
    CHECK(body.find("\"stationarity_residual\"") != std::string::npos);
    CHECK(body.find("66") != std::string::npos);  // the rounded type
}
