#include <benchmark/benchmark.h>

#include "gor/sim.hpp"

using namespace gor;
using topology::Node;
using topology::Role;

namespace {

crypto::KeyPair node_keys(const std::string& id) {
    Digest d = crypto::hash_str("node:" + id);
    return crypto::keygen(Bytes(d.begin(), d.end()));
}

sim::Scenario make_scenario(size_t relays, size_t senders) {
    sim::Scenario s;
    s.topo.add_node(Node{"entry", Role::entry, node_keys("entry"), {}});
    s.topo.add_node(Node{"exit", Role::exit, node_keys("exit"), {}});
    for (size_t i = 0; i < relays; ++i) {
        std::string id = "r" + std::to_string(i);
        s.topo.add_node(
            Node{id, Role::relay, node_keys(id), crypto::hash_str("contract:" + id)});
    }
    s.topo.fully_connect_relays(1);
    for (size_t i = 0; i < senders; ++i) {
        std::string name = "sender" + std::to_string(i);
        s.balances[name] = 100;
        s.txs.push_back({name, "sink", 1 + i, "tok", {}, 0});
    }
    s.balances["sink"] = 0;
    return s;
}

pam::Policy make_policy(uint32_t n_paths) {
    pam::Policy p;
    p.n_paths = n_paths;
    p.recorded_fields = {"amount", "asset"};
    return p;
}

}  // namespace

static void BM_RunScenario(benchmark::State& state) {
    auto senders = static_cast<size_t>(state.range(0));
    auto n_paths = static_cast<uint32_t>(state.range(1));
    sim::Scenario s = make_scenario(2 * n_paths + senders, senders);
    pam::Policy policy = make_policy(n_paths);
    uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::run_scenario(s, policy, seed++));
    state.SetItemsProcessed(state.iterations() * senders);
}
BENCHMARK(BM_RunScenario)->Args({1, 1})->Args({4, 1})->Args({4, 2})->Args({8, 2});

static void BM_RunDirect(benchmark::State& state) {
    sim::Scenario s = make_scenario(4, static_cast<size_t>(state.range(0)));
    uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_direct(s, seed++));
}
BENCHMARK(BM_RunDirect)->Arg(4);

BENCHMARK_MAIN();
