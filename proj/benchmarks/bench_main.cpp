#include <benchmark/benchmark.h>

#include <vector>

#include "rmp/rmp.hpp"

namespace {

const rmp::DistributionSpec kCauchy{rmp::CauchyRankOne{}};
const rmp::DistributionSpec kBinary{rmp::BinaryHill{2, 3, 0.5}};

std::vector<rmp::EntryTriple> draw(const rmp::DistributionSpec& spec, std::size_t n) {
    rmp::RandomStream s(1);
    std::vector<rmp::EntryTriple> out(n);
    for (auto& t : out) t = rmp::sample_triple(spec, s);
    return out;
}

void BM_AccumulatorStep(benchmark::State& state) {
    const auto triples = draw(kCauchy, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        rmp::ProductAccumulator acc(triples.front());
        for (std::size_t k = 1; k < triples.size(); ++k) acc.step(triples[k]);
        benchmark::DoNotOptimize(acc.log_norm());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AccumulatorStep)->Arg(1 << 10)->Arg(1 << 16);

void BM_DirectMultiplication(benchmark::State& state) {
    const auto triples = draw(kCauchy, static_cast<std::size_t>(state.range(0)));
    std::vector<rmp::Matrix2> ms;
    for (const auto& t : triples) ms.push_back(rmp::build_matrix(t));
    for (auto _ : state) benchmark::DoNotOptimize(rmp::direct_log_norm(ms));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DirectMultiplication)->Arg(1 << 10)->Arg(1 << 16);

void BM_SampleCauchy(benchmark::State& state) {
    rmp::RandomStream s(3);
    for (auto _ : state) benchmark::DoNotOptimize(rmp::sample_triple(kCauchy, s));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleCauchy);

void BM_LambdaMonteCarlo(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(rmp::estimate_lambda_mc(kCauchy, static_cast<std::uint64_t>(state.range(0)), 0).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LambdaMonteCarlo)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Sigma2MonteCarlo(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(
            rmp::estimate_sigma2_mc(kCauchy, static_cast<std::uint64_t>(state.range(0)), 0).sigma2.value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sigma2MonteCarlo)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ExactDiscrete(benchmark::State& state) {
    std::vector<rmp::Atom> atoms;
    const auto k = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < k; ++i)
        atoms.push_back({{1.0 + static_cast<double>(i), 0.5, 2.0}, 1.0 / static_cast<double>(k)});
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) total += atoms[i].probability;
    atoms.back().probability = 1.0 - total;
    const rmp::DistributionSpec spec(rmp::DiscreteAtoms{atoms});
    for (auto _ : state) benchmark::DoNotOptimize(rmp::exact_discrete(spec).sigma2);
}
BENCHMARK(BM_ExactDiscrete)->Arg(8)->Arg(64);

void BM_CltChains(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(rmp::simulate_normalized(kBinary, 1000, 200, 1.0, 1.0, 0).empirical_var);
}
BENCHMARK(BM_CltChains)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
