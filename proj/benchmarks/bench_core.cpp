// Microbenchmarks for the hot paths: view hashing and serialization,
// winner selection, signing, urn absorption, and a whole small scenario run.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "ccsim/ballmodel.hpp"
#include "ccsim/consensus.hpp"
#include "ccsim/netsim.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/bytes.hpp"

using namespace ccsim;

namespace {

BalanceView make_view(size_t accounts) {
    BalanceView v;
    v.records.reserve(accounts);
    for (size_t i = 0; i < accounts; ++i) {
        KeyPair kp = test_scheme().keygen(i);
        v.records.push_back(BalanceRecord{kp.pub, 1'000, 0});
    }
    std::sort(v.records.begin(), v.records.end(),
              [](const BalanceRecord& a, const BalanceRecord& b) { return a.pubkey < b.pubkey; });
    seal_view(v);
    return v;
}

void BM_view_hash(benchmark::State& state) {
    BalanceView v = make_view(static_cast<size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(view_hash(v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_view_hash)->Arg(100)->Arg(1'000)->Arg(10'000);

void BM_serialize_view(benchmark::State& state) {
    BalanceView v = make_view(static_cast<size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(serialize(v));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_serialize_view)->Arg(100)->Arg(1'000);

void BM_weighted_winner(benchmark::State& state) {
    std::vector<HashSample> samples;
    for (int i = 0; i < state.range(0); ++i) {
        KeyPair kp = test_scheme().keygen(static_cast<uint64_t>(i % 3));
        Digest d;
        std::copy(kp.pub.bytes.begin(), kp.pub.bytes.end(), d.bytes.begin());
        samples.push_back(HashSample{d, 1, static_cast<Amount>(100 + i)});
    }
    for (auto _ : state) benchmark::DoNotOptimize(weighted_winner(samples));
}
BENCHMARK(BM_weighted_winner)->Arg(9)->Arg(81);

void BM_sign_verify(benchmark::State& state) {
    const SignatureScheme& scheme = test_scheme();
    KeyPair kp = scheme.keygen(7);
    std::vector<uint8_t> msg(136, 0xAB);
    for (auto _ : state) {
        Signature sig = scheme.sign(kp.sec, msg);
        benchmark::DoNotOptimize(scheme.verify(kp.pub, msg, sig));
    }
}
BENCHMARK(BM_sign_verify);

void BM_urn_absorption(benchmark::State& state) {
    uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(run_to_absorption(UrnState{100, 100, 5}, 1'000'000, seed++));
}
BENCHMARK(BM_urn_absorption);

void BM_scenario_run(benchmark::State& state) {
    const std::string doc = R"({
        "version": 1, "name": "bench", "seed": 1, "run_ticks": 30,
        "total_supply": 1000000, "nodes": 10,
        "roles": {"agents": [0], "vesters": "all"},
        "traffic": {"kind": "auto", "per_tick": 2, "volume": 5, "fee": 1, "from": 0, "to": 20}
    })";
    for (auto _ : state) {
        Simulation sim(parse_scenario(doc));
        benchmark::DoNotOptimize(sim.run());
    }
}
BENCHMARK(BM_scenario_run)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
