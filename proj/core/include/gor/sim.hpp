#ifndef GOR_SIM_HPP
#define GOR_SIM_HPP

#include <optional>

#include "gor/pam.hpp"

namespace gor::sim {

using packet::NodeId;
using topology::Topology;

// One observation at a vantage point. kind distinguishes the client
// submission cell, overlay cells, core broadcasts, and plaintext
// direct-broadcast submissions (the control arm).
struct Event {
    uint64_t time = 0;
    NodeId from;
    NodeId to;
    std::string kind;  // "submit" | "pkt" | "broadcast" | "plain"
    Bytes data;

    bool operator==(const Event&) const = default;
};

struct TraceLog {
    std::vector<Event> events;

    std::string export_ndjson() const;
    Digest digest() const;
};

struct ScenarioTx {
    std::string sender;
    std::string receiver;
    uint64_t amount = 0;
    std::string asset = "tok";
    Bytes payload;
    uint64_t at = 0;  // submission tick
};

struct FaultConfig {
    std::optional<uint64_t> kill_sidechain_at;
    double packet_loss = 0.0;
};

struct Scenario {
    Topology topo;
    std::map<std::string, uint64_t> balances;  // actor name -> genesis funds
    std::vector<ScenarioTx> txs;
    bool acks = false;
    FaultConfig faults;
    std::string policy_ref;  // path named in the scenario file, may be empty
    uint64_t default_seed = 0;
};

// Who really sent what; taken from simulator state, never from the trace.
struct FlowTruth {
    Digest final_tx_id{};    // the tx visible on the core chain
    NodeId sender_client;    // "client:<name>"
    chain::Address receiver{};
    chain::Address real_sender{};
};

struct Metrics {
    uint64_t submitted = 0;
    uint64_t delivered = 0;
    uint64_t broadcasts = 0;
    uint64_t drops = 0;
    uint64_t replays_suppressed = 0;
    uint64_t lost = 0;
    uint64_t acks_sent = 0;
    uint64_t acks_received = 0;
    uint64_t acks_suppressed = 0;
};

struct ScenarioResult {
    chain::Ledger core;
    chain::Ledger side;
    TraceLog trace;
    Metrics metrics;
    std::map<Digest, FlowTruth> truth;  // keyed by message id
    // Per message: forward relay set (union over paths) and return relays.
    std::map<Digest, std::set<NodeId>> forward_relays;
    std::map<Digest, std::set<NodeId>> return_relays;
    std::vector<pam::AuditRecord> audit_store;  // PAM-private, not an artifact
};

// Acknowledgment path whose relay interior is disjoint from every forward
// relay already used for the message; nullopt when the topology cannot
// provide one (ack is then suppressed).
std::optional<packet::PathSpec> return_path(const std::set<NodeId>& forward_relays,
                                            const Topology& topo,
                                            size_t min_relays,
                                            std::mt19937_64& rng);

// End-to-end pipeline: receive -> policy -> peg in -> GOR -> relay ->
// reassemble -> peg out -> broadcast. Deterministic in (scenario, policy,
// seed).
ScenarioResult run_scenario(const Scenario& scenario, const pam::Policy& policy,
                            uint64_t seed);

// Control arm: the same workload broadcast in the clear, no overlay.
ScenarioResult run_direct(const Scenario& scenario, uint64_t seed);

// Deterministic actor/node key material.
crypto::KeyPair actor_keys(const std::string& name);
chain::Address actor_address(const std::string& name);

// PAM's custodial account on the core chain. Scenario balances are deposits
// held by PAM; the core genesis funds this pool, so real sender addresses
// never appear on-chain and peg locks draw from the pool.
chain::Address pam_pool_address();

}  // namespace gor::sim

#endif
