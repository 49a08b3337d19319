#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "hatdfed/rng.hpp"

namespace hatdfed {

struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int n_classes = 0;
    int dim = 0;

    std::size_t size() const { return labels.size(); }
};

struct Partition {
    std::vector<std::vector<int>> per_server_indices;
    std::vector<std::vector<double>> per_server_ratios;  // r_i over classes, sums to 1
    int shortfall_fills = 0;  // samples substituted from a nearby class
};

// Per-round device-to-edge connectivity. Row i holds the devices managed by
// server i; unmanaged pairs are implicitly 0.
struct DeviceConnectivity {
    int n_servers = 0;
    int devices_per_server = 0;
    std::vector<std::uint8_t> entries;  // n_servers * devices_per_server

    int at(int server, int device) const {
        return entries[static_cast<std::size_t>(server) * devices_per_server + device];
    }
    int connected_count(int server) const {
        int c = 0;
        for (int d = 0; d < devices_per_server; ++d) c += at(server, d);
        return c;
    }
};

// Gaussian class clusters with distinct means and shared isotropic spread.
// class_sep controls the attainable pooled accuracy: the default 2.5 keeps
// deliberate class overlap (~0.85 linear optimum); 4.0 or more exceeds 0.9.
Dataset gen_synthetic_dataset(int n_classes, int dim, int n_per_class, Rng& rng,
                              double class_sep = 2.5, double class_std = 1.0);

// Per-server class ratios drawn via normalized Gamma(lambda, 1); integer
// counts by largest-remainder apportionment; index lists are disjoint.
Partition dirichlet_partition(const Dataset& ds, double lambda_dir, int n_servers,
                              int per_server_size, Rng& rng);

DeviceConnectivity sample_device_connectivity(double rho, int n_servers,
                                              int devices_per_server, Rng& rng);

// Splits a round pool into n_subsets near-equal subsets (shuffled).
std::vector<std::vector<int>> split_into_subsets(std::span<const int> pool, int n_subsets,
                                                 Rng& rng);

// One subset per connected device, without replacement; returns the union.
std::vector<int> build_round_dataset(const std::vector<std::vector<int>>& subsets,
                                     int connected_devices, Rng& rng);

// Flat text table, one sample per line: label then features.
void save_dataset(const Dataset& ds, std::ostream& out);
Dataset load_dataset(std::istream& in);

}  // namespace hatdfed
