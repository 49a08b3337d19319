#include "hatdfed/energy.hpp"

#include <sstream>

namespace hatdfed {

double data_transmission_cost(int server, const DeviceConnectivity& conn, double psi) {
    if (psi < 0.0) throw EnergyError("psi must be >= 0");
    return psi * conn.connected_count(server);
}

double computation_cost(long long dataset_size, double tau) {
    if (!(tau > 0.0)) throw EnergyError("tau must be > 0");
    return static_cast<double>(dataset_size) * tau;
}

double model_transmission_cost(LinkId link, const SigmaMatrix& sigma) {
    if (link.src == link.dst) throw EnergyError("model_transmission_cost: self-link");
    return sigma.at(link.dst, link.src);
}

EnergyLedger::RoundSlice& EnergyLedger::slice(int round) {
    if (round < 1) throw EnergyError("round index starts at 1");
    if (round > static_cast<int>(rounds_.size())) {
        rounds_.resize(round);
        auto& r = rounds_[round - 1];
        r.e_dt.assign(n_, std::nullopt);
        r.e_cp.assign(n_, std::nullopt);
    }
    return rounds_[round - 1];
}

const EnergyLedger::RoundSlice& EnergyLedger::round(int round) const {
    if (round < 1 || round > static_cast<int>(rounds_.size()))
        throw EnergyError("round not recorded");
    return rounds_[round - 1];
}

void EnergyLedger::record_data(int round, int server, double joules) {
    if (joules < 0.0) throw EnergyError("negative energy");
    slice(round).e_dt[server] = joules;
}

void EnergyLedger::record_compute(int round, int server, double joules) {
    if (joules < 0.0) throw EnergyError("negative energy");
    slice(round).e_cp[server] = joules;
}

void EnergyLedger::record_model(int round, LinkId link, double joules) {
    if (joules < 0.0) throw EnergyError("negative energy");
    if (link.src == link.dst) throw EnergyError("self-link");
    slice(round).e_mt[{link.dst, link.src}] = joules;
}

double EnergyLedger::round_total(int round, const TopologyMatrix& topology) {
    auto& r = slice(round);
    for (int s = 0; s < n_; ++s) {
        if (!r.e_dt[s]) {
            std::ostringstream msg;
            msg << "round " << round << ": missing E^dt for server " << s;
            throw EnergyError(msg.str());
        }
        if (!r.e_cp[s]) {
            std::ostringstream msg;
            msg << "round " << round << ": missing E^cp for server " << s;
            throw EnergyError(msg.str());
        }
    }
    double mt = 0.0;
    for (int i = 0; i < topology.size(); ++i) {
        for (int j = 0; j < topology.size(); ++j) {
            if (!topology.at(i, j)) continue;
            auto it = r.e_mt.find({i, j});
            if (it == r.e_mt.end()) {
                std::ostringstream msg;
                msg << "round " << round << ": missing E^mt for link " << j << "->" << i;
                throw EnergyError(msg.str());
            }
            mt += it->second;
        }
    }
    double total = 0.0;
    for (int s = 0; s < n_; ++s) total += *r.e_dt[s];
    for (int s = 0; s < n_; ++s) total += *r.e_cp[s];
    total += mt;

    if (!r.closed) {
        r.total = total;
        r.closed = true;
        total_ += total;
        mt_total_ += mt;
    }
    return total;
}

}  // namespace hatdfed
