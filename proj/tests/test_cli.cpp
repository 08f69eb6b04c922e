#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "gammachan/config.hpp"
#include "gammachan/driver.hpp"
#include "gammachan/errors.hpp"
#include "gammachan/report.hpp"

using namespace gammachan;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    REQUIRE(out.good());
}

// small fast config used by the end-to-end exit-code and determinism checks
std::string tiny_config(const std::string& tag) {
    std::ostringstream out;
    out << "[channel]\n"
        << "alphas = 1.0\n"
        << "lambda = 1.0\n"
        << "r_min = 0.5\nr_max = 2\nr_count = 2\nr_spacing = linear\n"
        << "[input]\nkind = gamma\nshape = 1.0\nrate = 1.0\n"
        << "[estimation]\nmc_samples = 20000\nseed = 77\n"
        << "[outputs]\n"
        << "csv_path = /tmp/gammachan_cli_" << tag << ".csv\n"
        << "json_path = /tmp/gammachan_cli_" << tag << ".json\n";
    return out.str();
}

}  // namespace

TEST_CASE("config defaults validate and render round-trips through the parser") {
    ExperimentConfig cfg;
    cfg.validate();
    const std::string text = cfg.render();
    const ExperimentConfig back = parse_config_text(text, "render");
    CHECK(back.render() == text);
    CHECK(back.digest() == cfg.digest());
    CHECK(cfg.digest().size() == 16);
}

TEST_CASE("config rejections name the offending field") {
    ExperimentConfig cfg;
    cfg.alphas = {0.3};
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("channel.alphas") != std::string::npos);
        CHECK(msg.find("alpha >= 1/2") != std::string::npos);
    }

    cfg = ExperimentConfig{};
    cfg.r.count = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.r.min = 0.0;
    cfg.r.spacing = "log";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.estimation.mc_samples = 100;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.estimation.quad_rel_tol = 1e-3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    cfg = ExperimentConfig{};
    cfg.input.kind = "mixture";
    cfg.input.weights = {0.6, 0.6};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("parser reports unknown keys with file and line") {
    try {
        parse_config_text("[channel]\nlambda = 1\nturbo = yes\n", "test.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("test.ini") != std::string::npos);
        CHECK(msg.find("turbo") != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("no_section = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[channel]\nlambda == 1\n", "x"), ConfigError);
}

TEST_CASE("r grid spacing covers endpoints exactly") {
    ExperimentConfig cfg;
    cfg.r = {0.0, 4.0, 9, "linear"};
    auto grid = cfg.r_grid();
    REQUIRE(grid.size() == 9);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == 4.0);
    CHECK(grid[2] == doctest::Approx(1.0));

    cfg.r = {0.5, 2.0, 3, "log"};
    grid = cfg.r_grid();
    CHECK(grid.front() == 0.5);
    CHECK(grid.back() == 2.0);
    CHECK(grid[1] == doctest::Approx(1.0).epsilon(1e-12));

    cfg.r = {1.5, 1.5, 1, "linear"};
    grid = cfg.r_grid();
    REQUIRE(grid.size() == 1);
    CHECK(grid[0] == 1.5);
}

TEST_CASE("environment variables override file values") {
    ExperimentConfig cfg;
    ::setenv("GAMMACHAN_CHANNEL_LAMBDA", "2.5", 1);
    ::setenv("GAMMACHAN_ESTIMATION_SEED", "99", 1);
    apply_env_overrides(cfg);
    ::unsetenv("GAMMACHAN_CHANNEL_LAMBDA");
    ::unsetenv("GAMMACHAN_ESTIMATION_SEED");
    CHECK(cfg.lambda == 2.5);
    CHECK(cfg.estimation.seed == 99);

    ::setenv("GAMMACHAN_CHANNEL_LAMBDA", "not-a-number", 1);
    CHECK_THROWS_AS(apply_env_overrides(cfg), ConfigError);
    ::unsetenv("GAMMACHAN_CHANNEL_LAMBDA");
}

TEST_CASE("csv serialization pins the header and value formatting") {
    IdentityCheckRow row = equality_row(IdentityId::bound_eq28, "gamma(1,1)", 1.0, 1.0, 0.5,
                                        0.25, 0.25, 0.0, 0.0, 1e-6);
    const std::string csv = to_csv({row});
    const std::string header =
        "identity_id,input_id,alpha,lambda,r,lhs,rhs,lhs_se,rhs_se,tolerance,pass";
    REQUIRE(csv.rfind(header + "\n", 0) == 0);
    CHECK(csv.find("BOUND_EQ28,gamma(1,1),1,1,0.5,0.25,0.25,0,0,1e-06,true") !=
          std::string::npos);

    row.pass = std::nullopt;
    CHECK(to_csv({row}).find(",null") != std::string::npos);
}

TEST_CASE("identity names round-trip through their serialized tokens") {
    for (int k = 0; k <= static_cast<int>(IdentityId::relent_flow); ++k) {
        const auto id = static_cast<IdentityId>(k);
        CHECK(identity_from_string(to_string(id)) == id);
    }
    CHECK_THROWS(identity_from_string("NOT_AN_IDENTITY"));
}

TEST_CASE("unknown subcommands are rejected before any work starts") {
    ExperimentConfig cfg;
    CHECK_THROWS_AS(build_jobs("stein-checkk", cfg), ConfigError);
    for (const auto& name : subcommand_names()) {
        CHECK(!build_jobs(name, cfg).empty());
    }
}

TEST_CASE("run_cli: exit codes, file outputs, and byte determinism") {
    const std::string cfg_path = "/tmp/gammachan_cli_test.ini";
    write_text(cfg_path, tiny_config("a"));

    RunOptions opts;
    opts.subcommand = "stein-check";
    opts.config_path = cfg_path;
    CHECK(run_cli(opts) == 0);

    const std::string csv1 = slurp("/tmp/gammachan_cli_a.csv");
    const std::string json1 = slurp("/tmp/gammachan_cli_a.json");
    CHECK(csv1.rfind("identity_id,input_id,", 0) == 0);
    CHECK(json1.find("\"verdict\"") != std::string::npos);

    // same config, more workers: identical bytes
    opts.jobs = 4;
    CHECK(run_cli(opts) == 0);
    CHECK(slurp("/tmp/gammachan_cli_a.csv") == csv1);
    CHECK(slurp("/tmp/gammachan_cli_a.json") == json1);

    // a different seed changes the sampled numbers
    opts.seed = 1234;
    CHECK(run_cli(opts) == 0);
    CHECK(slurp("/tmp/gammachan_cli_a.csv") != csv1);

    // bad config file: usage exit
    write_text(cfg_path, "[channel]\nalphas = 0.2\n");
    opts = RunOptions{};
    opts.subcommand = "stein-check";
    opts.config_path = cfg_path;
    CHECK(run_cli(opts) == 2);

    opts.config_path = "/tmp/definitely_missing_gammachan.ini";
    CHECK(run_cli(opts) == 2);

    std::remove(cfg_path.c_str());
    std::remove("/tmp/gammachan_cli_a.csv");
    std::remove("/tmp/gammachan_cli_a.json");
}

TEST_CASE("json reports read back and re-serialize byte-identically") {
    const std::string cfg_path = "/tmp/gammachan_cli_rt.ini";
    write_text(cfg_path, tiny_config("rt"));
    RunOptions opts;
    opts.subcommand = "bounds-report";
    opts.config_path = cfg_path;
    REQUIRE(run_cli(opts) == 0);

    const std::string json_path = "/tmp/gammachan_cli_rt.json";
    const std::string text = slurp(json_path);
    const RunReport report = read_json_report(json_path);
    CHECK(!report.rows.empty());
    CHECK(report.code_version == kCodeVersion);
    CHECK(to_json(report) == text);

    std::remove(cfg_path.c_str());
    std::remove(json_path.c_str());
    std::remove("/tmp/gammachan_cli_rt.csv");
}
