#include <CLI11.hpp>

#include <iostream>

#include "hatdfed/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hatdfed: heterogeneity-aware decentralized federated learning simulator"};
    app.require_subcommand(1);

    hatdfed::cli::RunOptions run_opt;
    std::uint64_t seed_arg = 0;
    auto* run = app.add_subcommand("run", "run one experiment and emit CSVs");
    run->add_option("-c,--config", run_opt.config_path, "config JSON file");
    run->add_option("-p,--preset", run_opt.preset, "named preset (e.g. table1-desk)");
    run->add_option("-s,--strategy", run_opt.strategy, "hat-dfed | rnd | ring");
    run->add_option("-o,--out", run_opt.out_dir, "output directory")->required();
    auto* run_seed = run->add_option("--seed", seed_arg, "override config seed");
    run->add_flag("--chart", run_opt.chart, "also emit chart.svg");

    hatdfed::cli::SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
    sweep->add_option("--spec", sweep_opt.spec_path, "sweep spec JSON file")->required();
    sweep->add_option("-s,--strategy", sweep_opt.strategy, "hat-dfed | rnd | ring");
    sweep->add_option("-o,--out", sweep_opt.out_dir, "output directory")->required();
    auto* sweep_seed = sweep->add_option("--seed", seed_arg, "base seed (repeat r uses seed+r)");

    hatdfed::cli::BanditBenchOptions bb_opt;
    auto* bench = app.add_subcommand("bandit-bench", "standalone selector regret benchmark");
    bench->add_option("--env", bb_opt.env_path, "utility table file (K rows x n_links cols)");
    bench->add_option("--generator", bb_opt.generator,
                      "fixed-gap | drifting | adversarial-swap");
    bench->add_option("--rounds", bb_opt.n_rounds, "K");
    bench->add_option("--servers", bb_opt.n_servers, "N (arms = N(N-1))");
    bench->add_option("-m", bb_opt.m, "links selected per round");
    bench->add_option("--eta", bb_opt.eta, "learning rate; 0 = tuned");
    bench->add_option("--seed", bb_opt.seed, "RNG seed");
    bench->add_option("-o,--out", bb_opt.out_dir, "output directory")->required();

    std::string rounds_csv, energy_csv, out_svg;
    auto* report = app.add_subcommand("report", "re-render the chart from emitted CSVs");
    report->add_option("--rounds", rounds_csv, "rounds.csv path")->required();
    report->add_option("--energy", energy_csv, "energy.csv path")->required();
    report->add_option("-o,--out", out_svg, "output SVG path")->required();

    std::string cfg_path;
    auto* validate = app.add_subcommand("validate", "lint a config file");
    validate->add_option("config", cfg_path, "config JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : hatdfed::cli::kExitUsage;
    }

    if (run->parsed()) {
        if (run_seed->count()) run_opt.seed = seed_arg;
        return hatdfed::cli::cmd_run(run_opt, std::cerr);
    }
    if (sweep->parsed()) {
        if (sweep_seed->count()) sweep_opt.seed = seed_arg;
        return hatdfed::cli::cmd_sweep(sweep_opt, std::cerr);
    }
    if (bench->parsed()) return hatdfed::cli::cmd_bandit_bench(bb_opt, std::cout, std::cerr);
    if (report->parsed()) return hatdfed::cli::cmd_report(rounds_csv, energy_csv, out_svg, std::cerr);
    if (validate->parsed()) return hatdfed::cli::cmd_validate(cfg_path, std::cout, std::cerr);
    return hatdfed::cli::kExitUsage;
}
