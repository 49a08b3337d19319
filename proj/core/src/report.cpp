#include "hatdfed/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hatdfed {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

double parse_field(const std::string& s, const std::string& path, int line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw std::runtime_error(path + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_rounds_csv(const std::string& path, const RunResult& res) {
    auto f = open_out(path);
    f << kRoundsCsvHeader << "\n";
    for (const auto& rm : res.rounds)
        for (std::size_t s = 0; s < rm.accuracy.size(); ++s)
            f << rm.round << ',' << s << ',' << format_double(rm.accuracy[s]) << ','
              << rm.dataset_size[s] << "\n";
}

void write_energy_csv(const std::string& path, const RunResult& res) {
    auto f = open_out(path);
    const int n = res.config.n_servers;
    f << kEnergyServerHeader << "\n";
    for (const auto& rm : res.rounds) {
        const auto& slice = res.ledger.round(rm.round);
        for (int s = 0; s < n; ++s)
            f << rm.round << ',' << s << ',' << format_double(*slice.e_dt[s]) << ','
              << format_double(*slice.e_cp[s]) << "\n";
    }
    f << kEnergyLinkHeader << "\n";
    for (const auto& rm : res.rounds) {
        const auto& slice = res.ledger.round(rm.round);
        for (const auto& [key, e] : slice.e_mt)  // key = (receiver, sender)
            f << rm.round << ',' << key.second << ',' << key.first << ',' << format_double(e)
              << "\n";
    }
    f << kEnergySummaryHeader << "\n";
    f << format_double(res.summary.tot_cost_MJ) << ',' << format_double(res.summary.mt_cost_MJ)
      << "\n";
}

void write_summary_report(const std::string& path, const RunResult& res) {
    auto f = open_out(path);
    f << "strategy: " << strategy_name(res.strategy) << "\n"
      << "servers: " << res.config.n_servers << "\n"
      << "rounds: " << res.config.n_rounds << "\n"
      << "link_budget: " << link_budget(res.config.gamma, res.config.n_servers) << "\n"
      << "seed: " << res.config.seed << "\n"
      << "avg_acc: " << format_double(res.summary.avg_acc) << "\n"
      << "var_acc: " << format_double(res.summary.var_acc) << "\n"
      << "best_acc: " << format_double(res.summary.best_acc) << "\n"
      << "worst_acc: " << format_double(res.summary.worst_acc) << "\n"
      << "tot_cost_MJ: " << format_double(res.summary.tot_cost_MJ) << "\n"
      << "mt_cost_MJ: " << format_double(res.summary.mt_cost_MJ) << "\n";
}

void write_regret_csv(const std::string& path, const oracles::RegretResult& res) {
    auto f = open_out(path);
    f << kRegretCsvHeader << "\n";
    double cs = 0.0, co = 0.0;
    for (std::size_t k = 0; k < res.per_round_selected.size(); ++k) {
        cs += res.per_round_selected[k];
        co += res.per_round_oracle[k];
        f << (k + 1) << ',' << format_double(res.per_round_selected[k]) << ','
          << format_double(res.per_round_oracle[k]) << ',' << format_double(cs) << ','
          << format_double(co) << ',' << format_double(co - cs) << "\n";
    }
}

void write_regret_summary_csv(const std::string& path, const oracles::RegretResult& res) {
    auto f = open_out(path);
    f << kRegretSummaryHeader << "\n";
    f << format_double(res.regret) << ',' << format_double(res.bound) << ','
      << format_double(res.bound != 0.0 ? res.regret / res.bound : 0.0) << "\n";
}

std::string render_chart_svg(const std::vector<double>& mean_acc,
                             const std::vector<double>& round_energy_J) {
    if (mean_acc.empty()) throw std::invalid_argument("render_chart_svg: empty series");
    const int w = 720, h = 360, pad = 40;
    const int k = static_cast<int>(mean_acc.size());

    std::vector<double> cum_energy(round_energy_J.size());
    std::partial_sum(round_energy_J.begin(), round_energy_J.end(), cum_energy.begin());
    double emax = cum_energy.empty() ? 1.0 : std::max(1e-300, cum_energy.back());

    auto x_of = [&](int i) {
        return pad + (k == 1 ? 0.0 : (w - 2.0 * pad) * i / (k - 1));
    };
    auto polyline = [&](const std::vector<double>& y, double ymax, const char* color) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (int i = 0; i < static_cast<int>(y.size()); ++i) {
            double yy = h - pad - (h - 2.0 * pad) * std::clamp(y[i] / ymax, 0.0, 1.0);
            p << format_double(x_of(i)) << ',' << format_double(yy) << ' ';
        }
        p << "\"/>\n";
        return p.str();
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
        << h - pad << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad
        << "\" stroke=\"black\"/>\n"
        << polyline(mean_acc, 1.0, "#1f77b4");
    if (!cum_energy.empty()) svg << polyline(cum_energy, emax, "#d62728");
    svg << "<text x=\"" << pad << "\" y=\"" << pad - 12
        << "\" font-size=\"12\">blue: mean accuracy (0..1)   red: cumulative energy "
           "(normalized)</text>\n"
        << "</svg>\n";
    return svg.str();
}

void write_chart_svg(const std::string& path, const RunResult& res) {
    std::vector<double> mean_acc, energy;
    for (const auto& rm : res.rounds) {
        mean_acc.push_back(std::accumulate(rm.accuracy.begin(), rm.accuracy.end(), 0.0) /
                           rm.accuracy.size());
        energy.push_back(rm.round_energy_J);
    }
    open_out(path) << render_chart_svg(mean_acc, energy);
}

void render_chart_from_csv(const std::string& rounds_csv_path, const std::string& energy_csv_path,
                           const std::string& out_svg_path) {
    auto rf = open_in(rounds_csv_path);
    std::string line;
    if (!std::getline(rf, line) || line != kRoundsCsvHeader)
        throw std::runtime_error(rounds_csv_path + ":1: expected header '" +
                                 std::string(kRoundsCsvHeader) + "'");
    std::map<int, std::pair<double, int>> acc_by_round;  // round -> (sum, count)
    int lineno = 1;
    while (std::getline(rf, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 4)
            throw std::runtime_error(rounds_csv_path + ":" + std::to_string(lineno) +
                                     ": expected 4 fields");
        int round = static_cast<int>(parse_field(fields[0], rounds_csv_path, lineno));
        auto& [sum, cnt] = acc_by_round[round];
        sum += parse_field(fields[2], rounds_csv_path, lineno);
        ++cnt;
    }
    if (acc_by_round.empty()) throw std::runtime_error(rounds_csv_path + ": no data rows");

    auto ef = open_in(energy_csv_path);
    if (!std::getline(ef, line) || line != kEnergyServerHeader)
        throw std::runtime_error(energy_csv_path + ":1: expected header '" +
                                 std::string(kEnergyServerHeader) + "'");
    std::map<int, double> energy_by_round;
    lineno = 1;
    int section = 0;  // 0 = server rows, 1 = link rows, 2 = summary
    while (std::getline(ef, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line == kEnergyLinkHeader) {
            section = 1;
            continue;
        }
        if (line == kEnergySummaryHeader) {
            section = 2;
            continue;
        }
        auto fields = split_csv(line);
        if (section == 0) {
            if (fields.size() != 4)
                throw std::runtime_error(energy_csv_path + ":" + std::to_string(lineno) +
                                         ": expected 4 fields");
            int round = static_cast<int>(parse_field(fields[0], energy_csv_path, lineno));
            energy_by_round[round] += parse_field(fields[2], energy_csv_path, lineno) +
                                      parse_field(fields[3], energy_csv_path, lineno);
        } else if (section == 1) {
            if (fields.size() != 4)
                throw std::runtime_error(energy_csv_path + ":" + std::to_string(lineno) +
                                         ": expected 4 fields");
            int round = static_cast<int>(parse_field(fields[0], energy_csv_path, lineno));
            energy_by_round[round] += parse_field(fields[3], energy_csv_path, lineno);
        }
    }

    std::vector<double> mean_acc, energy;
    for (const auto& [round, se] : acc_by_round) {
        mean_acc.push_back(se.first / se.second);
        auto it = energy_by_round.find(round);
        energy.push_back(it == energy_by_round.end() ? 0.0 : it->second);
    }
    open_out(out_svg_path) << render_chart_svg(mean_acc, energy);
}

oracles::SyntheticBanditEnv load_utility_table(const std::string& path) {
    auto f = open_in(path);
    oracles::SyntheticBanditEnv env;
    std::string line;
    int row = 0;
    std::size_t width = 0;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> vals;
        std::string tok;
        while (ss >> tok) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || p != tok.data() + tok.size())
                throw std::runtime_error(path + ": row " + std::to_string(row) + ", col " +
                                         std::to_string(vals.size() + 1) + ": bad number '" + tok +
                                         "'");
            if (!(v >= 0.0 && v <= 1.0))
                throw std::runtime_error(path + ": row " + std::to_string(row) + ", col " +
                                         std::to_string(vals.size() + 1) +
                                         ": utility out of [0,1]");
            vals.push_back(v);
        }
        if (width == 0) width = vals.size();
        if (vals.size() != width)
            throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected " +
                                     std::to_string(width) + " columns, got " +
                                     std::to_string(vals.size()));
        env.utilities.push_back(std::move(vals));
    }
    if (env.utilities.empty()) throw std::runtime_error(path + ": empty utility table");
    return env;
}

void save_utility_table(const std::string& path, const oracles::SyntheticBanditEnv& env) {
    auto f = open_out(path);
    for (const auto& row : env.utilities) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) f << ' ';
            f << format_double(row[i]);
        }
        f << "\n";
    }
}

}  // namespace hatdfed
