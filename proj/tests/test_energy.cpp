#include <doctest.h>

#include "hatdfed/energy.hpp"

using namespace hatdfed;

namespace {

DeviceConnectivity conn_with(int connected, int total = 30) {
    DeviceConnectivity c;
    c.n_servers = 1;
    c.devices_per_server = total;
    c.entries.assign(total, 0);
    for (int i = 0; i < connected; ++i) c.entries[i] = 1;
    return c;
}

}  // namespace

TEST_CASE("data_transmission_cost") {
    CHECK(data_transmission_cost(0, conn_with(0), 62.72) == 0.0);
    CHECK(data_transmission_cost(0, conn_with(15), 62.72) == doctest::Approx(940.8));
    CHECK(data_transmission_cost(0, conn_with(30), 1.0) == doctest::Approx(30.0));
}

TEST_CASE("computation_cost") {
    CHECK(computation_cost(0, 0.5) == 0.0);
    CHECK(computation_cost(60, 0.5) == doctest::Approx(30.0));
    CHECK(computation_cost(120, 0.5) == doctest::Approx(60.0));
}

TEST_CASE("model_transmission_cost") {
    SigmaMatrix sigma(3);
    sigma.set(1, 0, 2360.0);
    CHECK(model_transmission_cost({0, 1}, sigma) == doctest::Approx(2360.0));
    CHECK_THROWS(model_transmission_cost({2, 2}, sigma));
}

TEST_CASE("round_total matches the hand-computed sum") {
    EnergyLedger ledger(2);
    ledger.record_data(1, 0, 1.0);
    ledger.record_data(1, 1, 2.0);
    ledger.record_compute(1, 0, 3.0);
    ledger.record_compute(1, 1, 4.0);
    TopologyMatrix topo(2);
    topo.set(1, 0, 1);  // link 0 -> 1
    ledger.record_model(1, {0, 1}, 5.0);
    CHECK(ledger.round_total(1, topo) == 15.0);
    CHECK(ledger.total_joules() == 15.0);
    CHECK(ledger.mt_joules() == 5.0);
}

TEST_CASE("round_total with empty and full topologies") {
    EnergyLedger ledger(2);
    for (int s = 0; s < 2; ++s) {
        ledger.record_data(1, s, 1.0);
        ledger.record_compute(1, s, 2.0);
    }
    CHECK(ledger.round_total(1, TopologyMatrix(2)) == 6.0);

    for (int s = 0; s < 2; ++s) {
        ledger.record_data(2, s, 1.0);
        ledger.record_compute(2, s, 2.0);
    }
    TopologyMatrix full(2);
    full.set(0, 1, 1);
    full.set(1, 0, 1);
    ledger.record_model(2, {1, 0}, 3.0);
    ledger.record_model(2, {0, 1}, 4.0);
    CHECK(ledger.round_total(2, full) == 13.0);
    CHECK(ledger.total_joules() == 19.0);
    CHECK(ledger.mt_joules() == 7.0);
    CHECK(ledger.mt_joules() <= ledger.total_joules());
}

TEST_CASE("round_total names missing components") {
    EnergyLedger ledger(2);
    ledger.record_data(1, 0, 1.0);
    ledger.record_compute(1, 0, 1.0);
    ledger.record_compute(1, 1, 1.0);
    CHECK_THROWS_WITH_AS(ledger.round_total(1, TopologyMatrix(2)), doctest::Contains("server 1"),
                         EnergyError);

    EnergyLedger l2(2);
    for (int s = 0; s < 2; ++s) {
        l2.record_data(1, s, 1.0);
        l2.record_compute(1, s, 1.0);
    }
    TopologyMatrix topo(2);
    topo.set(1, 0, 1);
    CHECK_THROWS_AS(l2.round_total(1, topo), EnergyError);  // link cost never recorded
}

TEST_CASE("adding a link never decreases the round total") {
    auto base = [] {
        EnergyLedger ledger(3);
        for (int s = 0; s < 3; ++s) {
            ledger.record_data(1, s, 1.0);
            ledger.record_compute(1, s, 1.0);
        }
        return ledger;
    };
    EnergyLedger a = base();
    TopologyMatrix t1(3);
    double without = a.round_total(1, t1);

    EnergyLedger b = base();
    TopologyMatrix t2(3);
    t2.set(2, 1, 1);
    b.record_model(1, {1, 2}, 7.0);
    CHECK(b.round_total(1, t2) >= without);
}
