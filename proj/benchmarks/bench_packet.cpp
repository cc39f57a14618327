#include <benchmark/benchmark.h>

#include <random>

#include "gor/packet.hpp"

using namespace gor;
using namespace gor::packet;

namespace {

std::map<NodeId, crypto::KeyPair>& keyring() {
    static std::map<NodeId, crypto::KeyPair> keys = [] {
        std::map<NodeId, crypto::KeyPair> out;
        for (const char* id : {"entry", "exit", "r0", "r1", "r2", "r3", "r4"}) {
            Digest d = crypto::hash_str(std::string("node:") + id);
            out[id] = crypto::keygen(Bytes(d.begin(), d.end()));
        }
        return out;
    }();
    return keys;
}

PathSpec make_path(size_t relays) {
    PathSpec p;
    p.entry = "entry";
    for (size_t i = 0; i < relays; ++i) p.relays.push_back("r" + std::to_string(i));
    p.exit = "exit";
    return p;
}

std::map<NodeId, Bytes> public_keys() {
    std::map<NodeId, Bytes> out;
    for (const auto& [id, kp] : keyring()) out[id] = kp.public_key;
    return out;
}

GarlicBulb sample_bulb() {
    std::mt19937_64 rng(1);
    Bytes payload(256);
    for (auto& b : payload) b = static_cast<uint8_t>(rng());
    return bundle({Clove{"exit", 0, 0, payload}});
}

}  // namespace

static void BM_BuildOnion(benchmark::State& state) {
    auto path = make_path(static_cast<size_t>(state.range(0)));
    auto pks = public_keys();
    auto bulb = sample_bulb();
    for (auto _ : state)
        benchmark::DoNotOptimize(build_onion(bulb, path, pks, kDefaultCellSize));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BuildOnion)->Arg(1)->Arg(3)->Arg(5);

static void BM_PeelChain(benchmark::State& state) {
    auto path = make_path(static_cast<size_t>(state.range(0)));
    auto pks = public_keys();
    auto pkt = build_onion(sample_bulb(), path, pks, kDefaultCellSize);
    for (auto _ : state) {
        OnionPacket cur = pkt;
        for (const auto& relay : path.relays)
            cur = std::get<RelayHop>(peel(cur, keyring().at(relay).secret_key)).inner;
        benchmark::DoNotOptimize(peel(cur, keyring().at("exit").secret_key));
    }
    state.SetItemsProcessed(state.iterations() * (state.range(0) + 1));
}
BENCHMARK(BM_PeelChain)->Arg(1)->Arg(3)->Arg(5);

static void BM_ChunkReassemble(benchmark::State& state) {
    std::mt19937_64 rng(2);
    Bytes message(4096);
    for (auto& b : message) b = static_cast<uint8_t>(rng());
    uint32_t n = static_cast<uint32_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(reassemble(chunk_message(message, n)));
}
BENCHMARK(BM_ChunkReassemble)->Arg(1)->Arg(4);

BENCHMARK_MAIN();
