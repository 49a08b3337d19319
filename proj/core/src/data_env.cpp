#include "hatdfed/data_env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hatdfed {

Dataset gen_synthetic_dataset(int n_classes, int dim, int n_per_class, Rng& rng,
                              double class_sep, double class_std) {
    if (n_classes < 1 || dim < 1 || n_per_class < 1)
        throw std::invalid_argument("gen_synthetic_dataset: counts must be >= 1");

    std::normal_distribution<double> gauss(0.0, 1.0);

    // Class means: random directions scaled to |mean| = class_sep.
    std::vector<std::vector<double>> means(n_classes, std::vector<double>(dim));
    for (auto& m : means) {
        double norm2 = 0.0;
        for (double& v : m) {
            v = gauss(rng);
            norm2 += v * v;
        }
        double scale = class_sep / std::max(std::sqrt(norm2), 1e-12);
        for (double& v : m) v *= scale;
    }

    Dataset ds;
    ds.n_classes = n_classes;
    ds.dim = dim;
    ds.features.reserve(static_cast<std::size_t>(n_classes) * n_per_class);
    ds.labels.reserve(ds.features.capacity());
    for (int c = 0; c < n_classes; ++c) {
        for (int s = 0; s < n_per_class; ++s) {
            std::vector<double> x(dim);
            for (int d = 0; d < dim; ++d) x[d] = means[c][d] + class_std * gauss(rng);
            ds.features.push_back(std::move(x));
            ds.labels.push_back(c);
        }
    }
    return ds;
}

namespace {

// Largest-remainder apportionment of `total` into counts proportional to r.
std::vector<int> apportion(const std::vector<double>& r, int total) {
    const int n = static_cast<int>(r.size());
    std::vector<int> counts(n);
    std::vector<std::pair<double, int>> rema(n);
    int assigned = 0;
    for (int i = 0; i < n; ++i) {
        double exact = r[i] * total;
        counts[i] = static_cast<int>(std::floor(exact));
        rema[i] = {exact - counts[i], i};
        assigned += counts[i];
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int k = 0; k < total - assigned; ++k) counts[rema[k].second] += 1;
    return counts;
}

}  // namespace

Partition dirichlet_partition(const Dataset& ds, double lambda_dir, int n_servers,
                              int per_server_size, Rng& rng) {
    if (static_cast<std::size_t>(n_servers) * per_server_size > ds.size()) {
        std::ostringstream msg;
        msg << "dirichlet_partition: need " << n_servers * per_server_size << " samples, have "
            << ds.size() << " (deficit "
            << static_cast<long>(n_servers) * per_server_size - static_cast<long>(ds.size())
            << ")";
        throw std::invalid_argument(msg.str());
    }
    const int L = ds.n_classes;

    // Per-class index pools, shuffled once.
    std::vector<std::vector<int>> pools(L);
    for (int i = 0; i < static_cast<int>(ds.size()); ++i) pools[ds.labels[i]].push_back(i);
    for (auto& p : pools) std::shuffle(p.begin(), p.end(), rng);

    Partition part;
    part.per_server_indices.resize(n_servers);
    part.per_server_ratios.resize(n_servers);
    std::gamma_distribution<double> gamma(lambda_dir, 1.0);

    for (int s = 0; s < n_servers; ++s) {
        std::vector<double> r(L);
        double sum = 0.0;
        for (int c = 0; c < L; ++c) {
            // Floor tiny Gamma draws so the lambda -> 0 single-label limit
            // stays numerically well defined.
            r[c] = std::max(gamma(rng), 1e-300);
            sum += r[c];
        }
        for (int c = 0; c < L; ++c) r[c] /= sum;
        part.per_server_ratios[s] = r;

        std::vector<int> want = apportion(r, per_server_size);
        auto& idx = part.per_server_indices[s];
        idx.reserve(per_server_size);
        for (int c = 0; c < L; ++c) {
            int take = std::min<int>(want[c], static_cast<int>(pools[c].size()));
            for (int k = 0; k < take; ++k) {
                idx.push_back(pools[c].back());
                pools[c].pop_back();
            }
            int short_by = want[c] - take;
            // Shortfall: fill from the nearest class (by label distance) that
            // still has samples.
            while (short_by > 0) {
                int best = -1;
                for (int dist = 1; dist < L && best < 0; ++dist) {
                    for (int cand : {c - dist, c + dist}) {
                        if (cand >= 0 && cand < L && !pools[cand].empty()) {
                            best = cand;
                            break;
                        }
                    }
                }
                if (best < 0) throw std::invalid_argument("dirichlet_partition: dataset exhausted");
                idx.push_back(pools[best].back());
                pools[best].pop_back();
                part.shortfall_fills += 1;
                --short_by;
            }
        }
    }
    return part;
}

DeviceConnectivity sample_device_connectivity(double rho, int n_servers,
                                              int devices_per_server, Rng& rng) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("sample_device_connectivity: rho out of [0,1]");
    DeviceConnectivity conn;
    conn.n_servers = n_servers;
    conn.devices_per_server = devices_per_server;
    conn.entries.resize(static_cast<std::size_t>(n_servers) * devices_per_server);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& e : conn.entries) e = static_cast<std::uint8_t>(u(rng) < rho);
    return conn;
}

std::vector<std::vector<int>> split_into_subsets(std::span<const int> pool, int n_subsets,
                                                 Rng& rng) {
    std::vector<int> shuffled(pool.begin(), pool.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::vector<std::vector<int>> subsets(n_subsets);
    for (std::size_t i = 0; i < shuffled.size(); ++i)
        subsets[i % n_subsets].push_back(shuffled[i]);
    return subsets;
}

std::vector<int> build_round_dataset(const std::vector<std::vector<int>>& subsets,
                                     int connected_devices, Rng& rng) {
    const int n = static_cast<int>(subsets.size());
    int take = std::min(connected_devices, n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> out;
    for (int k = 0; k < take; ++k)
        out.insert(out.end(), subsets[order[k]].begin(), subsets[order[k]].end());
    return out;
}

void save_dataset(const Dataset& ds, std::ostream& out) {
    out << ds.n_classes << " " << ds.dim << "\n";
    char buf[64];
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << ds.labels[i];
        for (double v : ds.features[i]) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            out << ' ' << std::string_view(buf, end - buf);
        }
        out << '\n';
    }
}

Dataset load_dataset(std::istream& in) {
    Dataset ds;
    if (!(in >> ds.n_classes >> ds.dim)) throw std::runtime_error("dataset: bad header");
    int label;
    while (in >> label) {
        if (label < 0 || label >= ds.n_classes) throw std::runtime_error("dataset: bad label");
        std::vector<double> x(ds.dim);
        for (double& v : x)
            if (!(in >> v)) throw std::runtime_error("dataset: truncated sample row");
        ds.labels.push_back(label);
        ds.features.push_back(std::move(x));
    }
    if (ds.labels.empty()) throw std::runtime_error("dataset: empty");
    return ds;
}

}  // namespace hatdfed
