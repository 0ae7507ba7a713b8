#include <random>

#include <benchmark/benchmark.h>

#include "gdm/aggregation.hpp"

namespace {

gdm::RoundInput makeRound(int candidates, int voters, unsigned seed) {
    std::mt19937 rng(seed);
    gdm::RoundInput in;
    for (int c = 0; c < candidates; ++c) in.candidates.push_back({"p" + std::to_string(c), c, {}, false});
    for (int v = 0; v < voters; ++v) in.weights.emplace_back(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 3));
    std::uniform_int_distribution<int> kind(0, 2);
    for (int v = 0; v < voters; ++v)
        for (int c = 0; c < candidates; ++c)
            if (rng() % 4 != 0) in.ballots.push_back({v, c, static_cast<gdm::AgreementKind>(kind(rng)), 0});
    in.eligibleCount = static_cast<std::size_t>(voters);
    return in;
}

void BM_TallyParallel(benchmark::State& state) {
    auto in = makeRound(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(gdm::tallyRound(in));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.ballots.size()));
}

void BM_TallySerial(benchmark::State& state) {
    auto in = makeRound(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(gdm::tallyRoundSerial(in));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(in.ballots.size()));
}

}  // namespace

BENCHMARK(BM_TallyParallel)->Args({16, 8})->Args({256, 32})->Args({2048, 64});
BENCHMARK(BM_TallySerial)->Args({16, 8})->Args({256, 32})->Args({2048, 64});

BENCHMARK_MAIN();
