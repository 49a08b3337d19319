#include <benchmark/benchmark.h>

#include "hatdfed/bandit.hpp"
#include "hatdfed/learner.hpp"
#include "hatdfed/orchestrator.hpp"

namespace {

using namespace hatdfed;

void BM_AssignProbabilities(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng = make_stream(7, "bench");
    std::vector<double> w(n);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (double& x : w) x = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(bandit::assign_probabilities(w, n / 3));
}
BENCHMARK(BM_AssignProbabilities)->Arg(20)->Arg(100)->Arg(1000);

void BM_DependentRounding(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng = make_stream(7, "bench");
    std::vector<double> w(n);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (double& x : w) x = u(rng);
    auto p = bandit::assign_probabilities(w, n / 3);
    for (auto _ : state) benchmark::DoNotOptimize(bandit::dependent_rounding(p, rng));
}
BENCHMARK(BM_DependentRounding)->Arg(20)->Arg(100)->Arg(1000);

void BM_ConstructTopology(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng = make_stream(7, "bench");
    auto bs = bandit::BanditState::init(n);
    bandit::UtilityInputs inputs;
    const int m = bandit::n_links(n) / 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(bandit::construct_topology(bs, inputs, 0.6, 0.1, m, rng));
}
BENCHMARK(BM_ConstructTopology)->Arg(5)->Arg(10)->Arg(20);

void BM_LocalTrain(benchmark::State& state) {
    Rng rng = make_stream(7, "bench");
    TaskSpec task;
    Dataset data = gen_synthetic_dataset(task.n_classes, task.dim, 200, rng, task.class_sep,
                                         task.class_std);
    ModelShape shape{task.dim, task.hidden, task.n_classes};
    ModelParams params = init_params(shape, rng);
    std::vector<int> idx(data.labels.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            local_train(params, data, idx, task.lr, task.epochs, task.batch, rng));
}
BENCHMARK(BM_LocalTrain);

}  // namespace

BENCHMARK_MAIN();
