#include "hatdfed/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "hatdfed/report.hpp"

namespace hatdfed::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

SimConfig preset_config(const std::string& name) {
    // All presets share the desk-scale defaults (N=5, 30 devices/server,
    // K=200, gamma=0.3, alpha=0.6, beta=0.4) and vary the heterogeneity knobs.
    SimConfig c;
    if (name == "table1-desk") return c;  // lambda_dir=0.3, rho=0.5
    if (name == "table1-desk-lam07") {
        c.lambda_dir = 0.7;
        return c;
    }
    if (name == "table1-desk-rho09") {
        c.rho = 0.9;
        return c;
    }
    std::string known;
    for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
    throw ConfigError("unknown preset \"" + name + "\" (known: " + known + ")");
}

std::vector<std::string> preset_names() {
    return {"table1-desk", "table1-desk-lam07", "table1-desk-rho09"};
}

SweepSpec parse_sweep_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep spec parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
    static const std::set<std::string> keys = {"parameter", "values", "repeats", "base_config"};
    for (auto& [key, _] : j.items())
        if (!keys.count(key)) throw ConfigError("unknown sweep spec key: \"" + key + "\"");

    SweepSpec s;
    try {
        s.parameter = j.at("parameter").get<std::string>();
        s.values = j.at("values").get<std::vector<double>>();
        s.repeats = j.at("repeats").get<int>();
        if (j.contains("base_config")) s.base_config = j.at("base_config").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad sweep spec: ") + e.what());
    }
    return s;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sweep_spec(ss.str());
}

namespace {

void apply_sweep_value(SimConfig& cfg, const std::string& param, double value) {
    if (param == "alpha") cfg.alpha = value;
    else if (param == "beta") cfg.beta = value;
    else if (param == "gamma") cfg.gamma = value;
    else if (param == "lambda_dir") cfg.lambda_dir = value;
    else if (param == "rho") cfg.rho = value;
    else throw ConfigError("unknown sweep parameter: " + param);
}

}  // namespace

std::vector<std::string> validate_sweep_spec(const SweepSpec& spec) {
    std::vector<std::string> v;
    static const std::set<std::string> params = {"alpha", "beta", "gamma", "lambda_dir", "rho"};
    if (!params.count(spec.parameter))
        v.push_back("parameter must be one of alpha, beta, gamma, lambda_dir, rho");
    if (spec.values.empty()) v.push_back("values must be non-empty");
    if (spec.repeats < 1) v.push_back("repeats must be >= 1");
    if (params.count(spec.parameter)) {
        SimConfig base;
        for (double val : spec.values) {
            SimConfig c = base;
            apply_sweep_value(c, spec.parameter, val);
            for (const auto& err : validate_config(c))
                v.push_back("value " + format_double(val) + ": " + err);
        }
    }
    return v;
}

namespace {

SimConfig resolve_config(const RunOptions& opt) {
    SimConfig cfg;
    if (!opt.preset.empty()) {
        if (!opt.config_path.empty())
            throw ConfigError("give either a config file or a preset, not both");
        cfg = preset_config(opt.preset);
    } else if (!opt.config_path.empty()) {
        cfg = load_config_file(opt.config_path);
    } else {
        throw ConfigError("no config file or preset given");
    }
    if (opt.seed) cfg.seed = *opt.seed;
    return cfg;
}

void write_run_outputs(const fs::path& dir, const RunResult& res, bool chart) {
    fs::create_directories(dir);
    write_rounds_csv((dir / "rounds.csv").string(), res);
    write_energy_csv((dir / "energy.csv").string(), res);
    write_summary_report((dir / "summary.txt").string(), res);
    if (chart) write_chart_svg((dir / "chart.svg").string(), res);
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& err) {
    SimConfig cfg;
    Strategy strategy;
    try {
        cfg = resolve_config(opt);
        strategy = parse_strategy(opt.strategy);
        auto violations = validate_config(cfg);
        if (!violations.empty()) {
            for (const auto& v : violations) err << "config error: " << v << "\n";
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        RunResult res = run_simulation(cfg, strategy);
        write_run_outputs(opt.out_dir, res, opt.chart);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_sweep(const SweepOptions& opt, std::ostream& err) {
    SweepSpec spec;
    SimConfig base;
    Strategy strategy;
    try {
        spec = load_sweep_spec(opt.spec_path);
        auto violations = validate_sweep_spec(spec);
        if (!violations.empty()) {
            for (const auto& v : violations) err << "sweep spec error: " << v << "\n";
            return kExitUsage;
        }
        base = spec.base_config.empty() ? preset_config("table1-desk")
                                        : load_config_file(spec.base_config);
        strategy = parse_strategy(opt.strategy);
        if (opt.seed) base.seed = *opt.seed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    fs::path out_dir(opt.out_dir);
    std::ofstream runs_csv, agg_csv;
    try {
        fs::create_directories(out_dir);
        runs_csv.open(out_dir / "sweep_runs.csv", std::ios::binary);
        agg_csv.open(out_dir / "sweep_agg.csv", std::ios::binary);
        if (!runs_csv || !agg_csv) throw std::runtime_error("cannot open sweep output files");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    runs_csv << kSweepRunsHeader << "\n";
    agg_csv << kSweepAggHeader << "\n";

    int n_ok_total = 0, n_failed_total = 0;
    for (double value : spec.values) {
        std::vector<double> accs, tots, mts;
        int n_failed = 0;
        for (int r = 0; r < spec.repeats; ++r) {
            SimConfig cfg = base;
            apply_sweep_value(cfg, spec.parameter, value);
            cfg.seed = base.seed + static_cast<std::uint64_t>(r);
            std::ostringstream dir_name;
            dir_name << spec.parameter << "_" << format_double(value) << "_rep" << r;
            try {
                RunResult res = run_simulation(cfg, strategy);
                write_run_outputs(out_dir / dir_name.str(), res, false);
                const auto& s = res.summary;
                runs_csv << spec.parameter << ',' << format_double(value) << ',' << r << ','
                         << cfg.seed << ',' << format_double(s.avg_acc) << ','
                         << format_double(s.var_acc) << ',' << format_double(s.best_acc) << ','
                         << format_double(s.worst_acc) << ',' << format_double(s.tot_cost_MJ)
                         << ',' << format_double(s.mt_cost_MJ) << ",ok\n";
                accs.push_back(s.avg_acc);
                tots.push_back(s.tot_cost_MJ);
                mts.push_back(s.mt_cost_MJ);
            } catch (const std::exception& e) {
                err << "run " << dir_name.str() << " failed: " << e.what() << "\n";
                runs_csv << spec.parameter << ',' << format_double(value) << ',' << r << ','
                         << cfg.seed << ",,,,,,,failed\n";
                ++n_failed;
            }
        }
        auto mean = [](const std::vector<double>& v) {
            return v.empty() ? 0.0
                             : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        };
        auto stdev = [&](const std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            double m = mean(v), sq = 0.0;
            for (double x : v) sq += (x - m) * (x - m);
            return std::sqrt(sq / v.size());
        };
        agg_csv << spec.parameter << ',' << format_double(value) << ','
                << format_double(mean(accs)) << ',' << format_double(stdev(accs)) << ','
                << format_double(mean(tots)) << ',' << format_double(stdev(tots)) << ','
                << format_double(mean(mts)) << ',' << format_double(stdev(mts)) << ','
                << (spec.repeats - n_failed) << ',' << n_failed << "\n";
        n_ok_total += spec.repeats - n_failed;
        n_failed_total += n_failed;
    }
    if (n_failed_total == 0) return kExitOk;
    return n_ok_total == 0 ? kExitRuntime : kExitPartial;
}

int cmd_bandit_bench(const BanditBenchOptions& opt, std::ostream& out, std::ostream& err) {
    oracles::SyntheticBanditEnv env;
    double eta = opt.eta;
    int n_servers = opt.n_servers;
    try {
        if (!opt.env_path.empty()) {
            env = load_utility_table(opt.env_path);
            n_servers = 2;
            while (n_servers * (n_servers - 1) < env.n_links()) ++n_servers;
        } else {
            if (opt.n_servers < 2) throw std::invalid_argument("n_servers must be >= 2");
            if (opt.n_rounds < 1) throw std::invalid_argument("n_rounds must be >= 1");
            int n_links = bandit::n_links(opt.n_servers);
            if (opt.m > n_links)
                throw std::invalid_argument("m exceeds the number of links N(N-1)");
            Rng env_rng = make_stream(opt.seed, "bench-env");
            env = oracles::make_env(oracles::parse_env_kind(opt.generator), opt.n_rounds, n_links,
                                    opt.m, env_rng);
        }
        if (opt.m < 1 || opt.m > env.n_links())
            throw std::invalid_argument("m out of [1, n_links]");
        if (eta == 0.0) eta = oracles::tuned_eta(n_servers, env.n_rounds());
        if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("eta out of (0,1]");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Rng rng = make_stream(opt.seed, "bench-selector");
        auto res = oracles::empirical_regret(env, opt.m, eta, rng);
        fs::create_directories(opt.out_dir);
        fs::path dir(opt.out_dir);
        write_regret_csv((dir / "regret.csv").string(), res);
        write_regret_summary_csv((dir / "regret_summary.csv").string(), res);
        out << "R_K=" << format_double(res.regret) << " bound=" << format_double(res.bound)
            << " ratio=" << format_double(res.bound != 0.0 ? res.regret / res.bound : 0.0)
            << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_report(const std::string& rounds_csv, const std::string& energy_csv,
               const std::string& out_svg, std::ostream& err) {
    try {
        render_chart_from_csv(rounds_csv, energy_csv, out_svg);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        SimConfig cfg = load_config_file(config_path);
        auto violations = validate_config(cfg);
        if (!violations.empty()) {
            for (const auto& v : violations) err << "config error: " << v << "\n";
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    out << "ok\n";
    return kExitOk;
}

}  // namespace hatdfed::cli
