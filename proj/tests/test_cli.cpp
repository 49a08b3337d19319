#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hatdfed/cli.hpp"
#include "hatdfed/report.hpp"

using namespace hatdfed;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::string s = slurp(p);
    return s.substr(0, s.find('\n'));
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("hatdfed_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
}

SimConfig small_config() {
    SimConfig cfg = cli::preset_config("table1-desk");
    cfg.n_rounds = 5;
    return cfg;
}

}  // namespace

TEST_CASE("presets") {
    SimConfig c = cli::preset_config("table1-desk");
    CHECK(c.n_servers == 5);
    CHECK(c.devices_per_server == 30);
    CHECK(c.n_rounds == 200);
    CHECK(c.lambda_dir == 0.3);
    CHECK(c.rho == 0.5);
    CHECK(c.gamma == 0.3);
    CHECK(c.alpha == 0.6);
    CHECK(c.beta == 0.4);
    CHECK(cli::preset_config("table1-desk-lam07").lambda_dir == 0.7);
    CHECK(cli::preset_config("table1-desk-rho09").rho == 0.9);
    CHECK_THROWS_WITH(cli::preset_config("bogus"), doctest::Contains("table1-desk"));
}

TEST_CASE("cmd_run writes the three outputs with the locked headers") {
    fs::path dir = fresh_dir("run");
    fs::path cfg = write_file(dir, "cfg.json", serialize_config(small_config()));
    cli::RunOptions opt;
    opt.config_path = cfg.string();
    opt.out_dir = (dir / "out").string();
    opt.chart = true;
    std::ostringstream err;
    CHECK(cli::cmd_run(opt, err) == cli::kExitOk);
    CHECK(err.str().empty());

    CHECK(first_line(dir / "out/rounds.csv") == kRoundsCsvHeader);
    CHECK(first_line(dir / "out/energy.csv") == kEnergyServerHeader);
    std::string energy = slurp(dir / "out/energy.csv");
    CHECK(energy.find(std::string("\n") + kEnergyLinkHeader + "\n") != std::string::npos);
    CHECK(energy.find(std::string("\n") + kEnergySummaryHeader + "\n") != std::string::npos);
    CHECK(slurp(dir / "out/summary.txt").find("avg_acc:") != std::string::npos);
    CHECK(slurp(dir / "out/chart.svg").find("<svg") != std::string::npos);
}

TEST_CASE("cmd_run error handling") {
    std::ostringstream err;
    cli::RunOptions opt;
    opt.config_path = "/nonexistent/cfg.json";
    opt.out_dir = "/tmp";
    CHECK(cli::cmd_run(opt, err) == cli::kExitUsage);
    CHECK(err.str().find("/nonexistent/cfg.json") != std::string::npos);

    fs::path dir = fresh_dir("runerr");
    std::string bad = serialize_config(small_config());
    bad.insert(bad.size() - 2, ",\n  \"typo_key\": 1");
    fs::path cfg = write_file(dir, "bad.json", bad);
    std::ostringstream err2;
    cli::RunOptions opt2;
    opt2.config_path = cfg.string();
    opt2.out_dir = dir.string();
    CHECK(cli::cmd_run(opt2, err2) == cli::kExitUsage);
    CHECK(err2.str().find("typo_key") != std::string::npos);

    std::ostringstream err3;
    cli::RunOptions opt3;
    opt3.preset = "table1-desk";
    opt3.strategy = "bogus";
    opt3.out_dir = dir.string();
    CHECK(cli::cmd_run(opt3, err3) == cli::kExitUsage);
}

TEST_CASE("cmd_run with the same seed is byte-identical") {
    fs::path dir = fresh_dir("det");
    fs::path cfg = write_file(dir, "cfg.json", serialize_config(small_config()));
    std::ostringstream err;
    for (const char* out : {"a", "b"}) {
        cli::RunOptions opt;
        opt.config_path = cfg.string();
        opt.out_dir = (dir / out).string();
        REQUIRE(cli::cmd_run(opt, err) == cli::kExitOk);
    }
    for (const char* f : {"rounds.csv", "energy.csv", "summary.txt"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
}

TEST_CASE("sweep spec parsing and validation") {
    auto spec = cli::parse_sweep_spec(
        R"({"parameter":"gamma","values":[0.1,0.2],"repeats":2,"base_config":""})");
    CHECK(spec.parameter == "gamma");
    CHECK(spec.values == std::vector<double>{0.1, 0.2});
    CHECK(spec.repeats == 2);
    CHECK(cli::validate_sweep_spec(spec).empty());

    spec.values.clear();
    CHECK_FALSE(cli::validate_sweep_spec(spec).empty());
    spec.values = {0.1};
    spec.parameter = "bogus";
    CHECK_FALSE(cli::validate_sweep_spec(spec).empty());
    spec.parameter = "alpha";
    spec.repeats = 0;
    CHECK_FALSE(cli::validate_sweep_spec(spec).empty());
    spec.repeats = 1;
    spec.values = {2.0};  // out of range for alpha
    CHECK_FALSE(cli::validate_sweep_spec(spec).empty());

    CHECK_THROWS_AS(cli::parse_sweep_spec("{\"oops\":1}"), ConfigError);
}

TEST_CASE("cmd_sweep runs the value grid and aggregates") {
    fs::path dir = fresh_dir("sweep");
    fs::path base = write_file(dir, "base.json", serialize_config(small_config()));
    fs::path spec = write_file(dir, "spec.json",
                               "{\"parameter\":\"gamma\",\"values\":[0.1,0.3],\"repeats\":2,"
                               "\"base_config\":\"" + base.string() + "\"}");
    cli::SweepOptions opt;
    opt.spec_path = spec.string();
    opt.out_dir = (dir / "out").string();
    std::ostringstream err;
    CHECK(cli::cmd_sweep(opt, err) == cli::kExitOk);

    std::string runs = slurp(dir / "out/sweep_runs.csv");
    CHECK(first_line(dir / "out/sweep_runs.csv") == kSweepRunsHeader);
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 5);  // header + 4 runs
    std::string agg = slurp(dir / "out/sweep_agg.csv");
    CHECK(first_line(dir / "out/sweep_agg.csv") == kSweepAggHeader);
    CHECK(std::count(agg.begin(), agg.end(), '\n') == 3);  // header + 2 rows
    CHECK(fs::exists(dir / "out/gamma_0.1_rep0/rounds.csv"));
    CHECK(fs::exists(dir / "out/gamma_0.3_rep1/summary.txt"));

    // repeats=1 reports zero spread
    fs::path spec1 = write_file(dir, "spec1.json",
                                "{\"parameter\":\"gamma\",\"values\":[0.2],\"repeats\":1,"
                                "\"base_config\":\"" + base.string() + "\"}");
    cli::SweepOptions opt1;
    opt1.spec_path = spec1.string();
    opt1.out_dir = (dir / "out1").string();
    CHECK(cli::cmd_sweep(opt1, err) == cli::kExitOk);
    std::string agg1 = slurp(dir / "out1/sweep_agg.csv");
    auto second_line = agg1.substr(agg1.find('\n') + 1);
    std::stringstream ss(second_line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    CHECK(fields[3] == "0");  // avg_acc_std
    CHECK(fields[5] == "0");  // tot_cost_MJ_std

    // invalid spec fails with a usage exit
    fs::path bad = write_file(dir, "bad.json",
                              "{\"parameter\":\"gamma\",\"values\":[],\"repeats\":1}");
    cli::SweepOptions optb;
    optb.spec_path = bad.string();
    optb.out_dir = (dir / "outb").string();
    std::ostringstream errb;
    CHECK(cli::cmd_sweep(optb, errb) == cli::kExitUsage);
}

TEST_CASE("cmd_bandit_bench emits regret CSVs") {
    fs::path dir = fresh_dir("bench");
    cli::BanditBenchOptions opt;
    opt.n_rounds = 50;
    opt.out_dir = (dir / "out").string();
    std::ostringstream out, err;
    CHECK(cli::cmd_bandit_bench(opt, out, err) == cli::kExitOk);
    CHECK(out.str().find("R_K=") != std::string::npos);
    CHECK(out.str().find("bound=") != std::string::npos);

    std::string regret = slurp(dir / "out/regret.csv");
    CHECK(first_line(dir / "out/regret.csv") == kRegretCsvHeader);
    CHECK(std::count(regret.begin(), regret.end(), '\n') == 51);  // header + K rows
    CHECK(first_line(dir / "out/regret_summary.csv") == kRegretSummaryHeader);

    cli::BanditBenchOptions bad = opt;
    bad.m = 25;  // exceeds N(N-1) = 20
    std::ostringstream out2, err2;
    CHECK(cli::cmd_bandit_bench(bad, out2, err2) == cli::kExitUsage);
}

TEST_CASE("utility table round-trip and diagnostics") {
    fs::path dir = fresh_dir("table");
    Rng rng = make_stream(51, "oracle");
    auto env = oracles::make_env(oracles::EnvKind::fixed_gap, 10, 6, 2, rng);
    fs::path p = dir / "env.txt";
    save_utility_table(p.string(), env);
    auto back = load_utility_table(p.string());
    CHECK(back.utilities == env.utilities);

    fs::path bad = write_file(dir, "bad.txt", "0.5 0.5\n0.5 abc\n");
    CHECK_THROWS_WITH(load_utility_table(bad.string()), doctest::Contains("row 2"));
    fs::path oob = write_file(dir, "oob.txt", "0.5 1.5\n");
    CHECK_THROWS_WITH(load_utility_table(oob.string()), doctest::Contains("col 2"));
    fs::path ragged = write_file(dir, "ragged.txt", "0.5 0.5\n0.5\n");
    CHECK_THROWS(load_utility_table(ragged.string()));
}

TEST_CASE("cmd_report re-renders the chart from CSVs") {
    fs::path dir = fresh_dir("report");
    fs::path cfg = write_file(dir, "cfg.json", serialize_config(small_config()));
    cli::RunOptions ropt;
    ropt.config_path = cfg.string();
    ropt.out_dir = (dir / "out").string();
    std::ostringstream err;
    REQUIRE(cli::cmd_run(ropt, err) == cli::kExitOk);

    fs::path svg = dir / "chart.svg";
    CHECK(cli::cmd_report((dir / "out/rounds.csv").string(), (dir / "out/energy.csv").string(),
                          svg.string(), err) == cli::kExitOk);
    CHECK(slurp(svg).find("<svg") != std::string::npos);

    CHECK(cli::cmd_report("/nonexistent.csv", (dir / "out/energy.csv").string(), svg.string(),
                          err) == cli::kExitRuntime);
}

TEST_CASE("cmd_validate") {
    fs::path dir = fresh_dir("validate");
    fs::path good = write_file(dir, "good.json", serialize_config(small_config()));
    std::ostringstream out, err;
    CHECK(cli::cmd_validate(good.string(), out, err) == cli::kExitOk);
    CHECK(out.str() == "ok\n");

    SimConfig bad_cfg = small_config();
    bad_cfg.gamma = 0.0;
    std::string bad_text = serialize_config(bad_cfg);
    fs::path bad = write_file(dir, "bad.json", bad_text);
    std::ostringstream out2, err2;
    CHECK(cli::cmd_validate(bad.string(), out2, err2) == cli::kExitUsage);
    CHECK(err2.str().find("gamma") != std::string::npos);
}
