#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

#include "hatdfed/data_env.hpp"
#include "hatdfed/learner.hpp"

using namespace hatdfed;

TEST_CASE("gen_synthetic_dataset is deterministic under seed") {
    Rng a = make_stream(1, "data"), b = make_stream(1, "data");
    Dataset d1 = gen_synthetic_dataset(4, 8, 200, a);
    Dataset d2 = gen_synthetic_dataset(4, 8, 200, b);
    CHECK(d1.labels == d2.labels);
    CHECK(d1.features == d2.features);
}

TEST_CASE("gen_synthetic_dataset single class") {
    Rng rng = make_stream(2, "data");
    Dataset d = gen_synthetic_dataset(1, 2, 10, rng);
    CHECK(d.size() == 10);
    for (int l : d.labels) CHECK(l == 0);
}

TEST_CASE("pooled accuracy tracks the class separation") {
    auto fit = [](double sep) {
        Rng rng = make_stream(3, "data");
        Dataset d = gen_synthetic_dataset(4, 8, 500, rng, sep);
        ModelParams p = init_params({8, 0, 4}, rng);
        std::vector<int> idx(d.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (int e = 0; e < 20; ++e) p = local_train(p, d, idx, 0.05, 1, 10, rng).params_out;
        return evaluate_accuracy(p, d);
    };
    CHECK(fit(2.5) > 0.75);  // default: deliberate overlap
    CHECK(fit(4.0) > 0.9);   // well-separated clusters
}

TEST_CASE("dirichlet_partition ratios and disjointness") {
    Rng rng = make_stream(4, "data");
    Dataset d = gen_synthetic_dataset(4, 4, 1200, rng);
    Partition part = dirichlet_partition(d, 0.3, 5, 800, rng);
    std::set<int> seen;
    for (int s = 0; s < 5; ++s) {
        double sum = std::accumulate(part.per_server_ratios[s].begin(),
                                     part.per_server_ratios[s].end(), 0.0);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        for (double r : part.per_server_ratios[s]) CHECK(r >= 0.0);
        CHECK(part.per_server_indices[s].size() == 800);
        for (int i : part.per_server_indices[s]) CHECK(seen.insert(i).second);
    }
}

TEST_CASE("dirichlet_partition concentrates to uniform for huge lambda") {
    Rng rng = make_stream(5, "data");
    Dataset d = gen_synthetic_dataset(4, 2, 500, rng);
    std::vector<double> mean(4, 0.0);
    const int draws = 100;
    for (int t = 0; t < draws; ++t) {
        Partition p = dirichlet_partition(d, 1e6, 3, 100, rng);
        for (int s = 0; s < 3; ++s)
            for (int c = 0; c < 4; ++c) mean[c] += p.per_server_ratios[s][c];
    }
    for (int c = 0; c < 4; ++c) CHECK(mean[c] / (3 * draws) == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("dirichlet_partition mean ratio approaches uniform at small lambda too") {
    Rng rng = make_stream(6, "data");
    Dataset d = gen_synthetic_dataset(4, 2, 400, rng);
    std::vector<double> mean(4, 0.0);
    const int draws = 1000;
    for (int t = 0; t < draws; ++t) {
        Partition p = dirichlet_partition(d, 0.3, 1, 50, rng);
        for (int c = 0; c < 4; ++c) mean[c] += p.per_server_ratios[0][c];
    }
    for (int c = 0; c < 4; ++c) CHECK(std::abs(mean[c] / draws - 0.25) < 0.05);
}

TEST_CASE("dirichlet_partition single server and sizing error") {
    Rng rng = make_stream(7, "data");
    Dataset d = gen_synthetic_dataset(2, 2, 100, rng);
    Partition p = dirichlet_partition(d, 0.5, 1, 150, rng);
    CHECK(p.per_server_indices[0].size() == 150);
    CHECK_THROWS_WITH_AS(dirichlet_partition(d, 0.5, 3, 100, rng), doctest::Contains("deficit"),
                         std::invalid_argument);
}

TEST_CASE("sample_device_connectivity extremes and mean") {
    Rng rng = make_stream(8, "connectivity");
    auto all = sample_device_connectivity(1.0, 3, 10, rng);
    for (int s = 0; s < 3; ++s) CHECK(all.connected_count(s) == 10);
    auto none = sample_device_connectivity(0.0, 3, 10, rng);
    for (int s = 0; s < 3; ++s) CHECK(none.connected_count(s) == 0);

    double total = 0.0;
    const int rounds = 10000;
    for (int t = 0; t < rounds; ++t)
        total += sample_device_connectivity(0.5, 1, 30, rng).connected_count(0);
    double mean = total / rounds;
    CHECK(mean > 14.7);
    CHECK(mean < 15.3);
    CHECK_THROWS(sample_device_connectivity(1.5, 1, 1, rng));
}

TEST_CASE("round dataset selection") {
    Rng rng = make_stream(9, "data");
    std::vector<int> pool(60);
    std::iota(pool.begin(), pool.end(), 100);
    auto subsets = split_into_subsets(pool, 30, rng);
    REQUIRE(subsets.size() == 30);
    for (const auto& s : subsets) CHECK(s.size() == 2);

    CHECK(build_round_dataset(subsets, 0, rng).empty());

    auto full = build_round_dataset(subsets, 30, rng);
    CHECK(full.size() == 60);
    CHECK(std::set<int>(full.begin(), full.end()) == std::set<int>(pool.begin(), pool.end()));

    CHECK(build_round_dataset(subsets, 15, rng).size() == 30);
    // connected count above the subset count clamps to the full pool
    CHECK(build_round_dataset(subsets, 40, rng).size() == 60);
}

TEST_CASE("dataset text round-trip") {
    Rng rng = make_stream(10, "data");
    Dataset d = gen_synthetic_dataset(3, 4, 20, rng);
    std::stringstream ss;
    save_dataset(d, ss);
    Dataset back = load_dataset(ss);
    CHECK(back.n_classes == d.n_classes);
    CHECK(back.dim == d.dim);
    CHECK(back.labels == d.labels);
    CHECK(back.features == d.features);

    std::stringstream bad("2 2\n5 1.0 2.0\n");
    CHECK_THROWS(load_dataset(bad));
}
