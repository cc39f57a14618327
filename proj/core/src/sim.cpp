#include "gor/sim.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace gor::sim {

using chain::Transaction;
using ordered_json = nlohmann::ordered_json;
using packet::Chunk;
using packet::Clove;
using packet::GarlicBulb;
using packet::OnionPacket;
using packet::PathSpec;

crypto::KeyPair actor_keys(const std::string& name) {
    Digest d = crypto::hash_str("actor:" + name);
    return crypto::keygen(Bytes(d.begin(), d.end()));
}

chain::Address actor_address(const std::string& name) {
    return chain::address_of(actor_keys(name).public_key);
}

chain::Address pam_pool_address() {
    return chain::address_of(actor_keys("@pam-pool").public_key);
}

std::string TraceLog::export_ndjson() const {
    std::ostringstream out;
    for (const auto& e : events) {
        ordered_json j;
        j["time"] = e.time;
        j["from"] = e.from;
        j["to"] = e.to;
        j["kind"] = e.kind;
        j["size"] = e.data.size();
        j["data"] = hex_encode(e.data);
        out << j.dump() << "\n";
    }
    return out.str();
}

Digest TraceLog::digest() const {
    ByteWriter w;
    for (const auto& e : events) {
        w.u64(e.time);
        w.str(e.from);
        w.str(e.to);
        w.str(e.kind);
        w.blob(e.data);
    }
    return crypto::hash(w.take());
}

std::optional<PathSpec> return_path(const std::set<NodeId>& forward_relays,
                                    const Topology& topo, size_t min_relays,
                                    std::mt19937_64& rng) {
    auto relay_ok = [&](const NodeId& id) { return !forward_relays.count(id); };
    auto candidates = topo.enumerate_paths(topo.exit_node(), topo.entry_node(),
                                           min_relays, packet::kMaxPathLength,
                                           relay_ok);
    if (candidates.empty()) return std::nullopt;
    std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
}

namespace {

constexpr const char* kAckMagic = "ack:";

struct QueuedEvent {
    uint64_t time;
    uint64_t tiebreak;
    uint64_t seq;
    Event event;
};

struct QueueOrder {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        return std::tie(a.time, a.tiebreak, a.seq) > std::tie(b.time, b.tiebreak, b.seq);
    }
};

Bytes wrap_cell(const Bytes& box_bytes, size_t cell_size) {
    ByteWriter w;
    w.blob(box_bytes);
    w.pad_zero_to(cell_size);
    return w.take();
}

Bytes unwrap_cell(const Bytes& cell) {
    ByteReader r(cell);
    Bytes box = r.blob();
    r.expect_zero_fill();
    return box;
}

Bytes det_seed(uint64_t seed, const Digest& mix, const std::string& label,
               uint64_t counter) {
    ByteWriter w;
    w.u64(seed);
    w.raw(mix);
    w.str(label);
    w.u64(counter);
    Digest d = crypto::hash(w.take());
    return Bytes(d.begin(), d.end());
}

// In-flight reassembly state at the exit node.
struct PendingMessage {
    std::vector<Chunk> chunks;
    uint32_t total = 0;
};

class Runner {
public:
    Runner(const Scenario& scenario, const pam::Policy& policy, uint64_t seed)
        : scenario_(scenario),
          policy_(policy),
          seed_(seed),
          rng_(seed ^ 0x9e3779b97f4a7c15ull),
          pam_(policy),
          core_("core", genesis_alloc()),
          side_("side", {}) {
        // PAM vets one contract per relay; per policy the vetting may strip
        // fields or quarantine, which takes the relay out of rotation.
        for (const auto& [id, node] : scenario_.topo.nodes()) {
            if (node.role != topology::Role::relay) continue;
            chain::SmartContract sc;
            sc.contract_id = node.contract_id;
            sc.relay_public_key = node.keypair.public_key;
            sc.allowed_fields = pam::routing_fields();
            pam_.register_contract(std::move(sc));
        }
        deposits_ = deposit_alloc();
    }

    ScenarioResult run();

private:
    // The core genesis funds PAM's custodial pool with the sum of all actor
    // deposits; per-actor balances stay PAM-internal so no real sender
    // address ever reaches a chain.
    std::map<chain::Address, uint64_t> genesis_alloc() const {
        uint64_t total = 0;
        for (const auto& [name, amount] : scenario_.balances) total += amount;
        if (total == 0) return {};
        return {{pam_pool_address(), total}};
    }

    std::map<chain::Address, uint64_t> deposit_alloc() const {
        std::map<chain::Address, uint64_t> alloc;
        for (const auto& [name, amount] : scenario_.balances)
            alloc[actor_address(name)] += amount;
        return alloc;
    }

    void enqueue(uint64_t time, Event e) {
        queue_.push(QueuedEvent{time, rng_(), seq_++, std::move(e)});
    }

    bool sidechain_dead(uint64_t time) const {
        return scenario_.faults.kill_sidechain_at &&
               time >= *scenario_.faults.kill_sidechain_at;
    }

    std::map<NodeId, Bytes> node_public_keys() const {
        std::map<NodeId, Bytes> keys;
        for (const auto& [id, n] : scenario_.topo.nodes())
            keys[id] = n.keypair.public_key;
        return keys;
    }

    void handle_submit(const Event& e);
    void handle_pkt(const Event& e);
    void deliver_message(const Digest& message_id, uint64_t time);
    void send_ack(const Digest& message_id, uint64_t time);

    const Scenario& scenario_;
    const pam::Policy& policy_;
    uint64_t seed_;
    std::mt19937_64 rng_;
    pam::Pam pam_;
    peg::PegBridge bridge_;
    chain::Ledger core_;
    chain::Ledger side_;
    TraceLog trace_;
    Metrics metrics_;
    std::map<Digest, FlowTruth> truth_;
    std::map<Digest, std::set<NodeId>> forward_relays_;
    std::map<Digest, std::set<NodeId>> return_relays_;
    std::map<Digest, PendingMessage> pending_;
    std::map<chain::Address, uint64_t> deposits_;
    std::map<NodeId, std::set<Digest>> seen_at_relay_;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, QueueOrder> queue_;
    uint64_t seq_ = 0;
    uint64_t onion_counter_ = 0;
};

void Runner::handle_submit(const Event& e) {
    const NodeId entry = scenario_.topo.entry_node();
    Bytes box = unwrap_cell(e.data);
    Bytes tx_bytes =
        crypto::open(crypto::SealedBox::deserialize(box),
                     scenario_.topo.node(entry).keypair.secret_key);
    Transaction tx = Transaction::full_deserialize(tx_bytes);

    // Senders spend from their PAM-held deposit, not from an on-chain account.
    auto deposit = deposits_.find(tx.sender);
    if (deposit == deposits_.end() || deposit->second < tx.amount) {
        metrics_.drops++;
        return;
    }

    // Algorithm steps at the entry: policy decision, identity hiding,
    // field recording, peg-in, relay allocation, chunked garlic onions.
    pam::PolicyDecision decision = pam_.evaluate(tx, scenario_.topo, seed_);

    Transaction final_tx = tx;
    if (policy_.pseudonymize) final_tx = pam_.hide_identity(tx, decision.session_nonce);
    pam_.store_audit(pam::record_fields(policy_, tx));

    deposit->second -= tx.amount;
    peg::PegProof lock = bridge_.lock_on_core(core_, pam_pool_address(), tx.amount,
                                              final_tx.sender, e.time);
    bridge_.mint_on_side(side_, lock, core_);
    side_.seal_block(e.time);

    pam_.allocate_relays(scenario_.topo, decision);

    Bytes message = final_tx.full_serialize();
    const Digest message_id = crypto::hash(message);
    auto chunks = packet::chunk_message(message, decision.n_chunks);
    auto keys = node_public_keys();

    for (size_t i = 0; i < chunks.size(); ++i) {
        const PathSpec& path = decision.paths[i];
        Clove clove;
        clove.destination = path.exit;
        clove.clove_id = i;
        clove.sent_at = e.time;
        clove.payload = chunks[i].serialize();
        GarlicBulb bulb = packet::bundle({clove});
        OnionPacket onion =
            packet::build_onion(bulb, path, keys, policy_.cell_size,
                                det_seed(seed_, message_id, "onion", onion_counter_++));
        forward_relays_[message_id].insert(path.relays.begin(), path.relays.end());
        Event pkt;
        pkt.time = e.time + scenario_.topo.latency(entry, path.relays.front());
        pkt.from = entry;
        pkt.to = path.relays.front();
        pkt.kind = "pkt";
        pkt.data = onion.serialize(policy_.cell_size);
        enqueue(pkt.time, std::move(pkt));
    }

    auto& truth = truth_[message_id];
    truth.sender_client = e.from;
    truth.receiver = tx.receiver;
    truth.real_sender = tx.sender;
}

void Runner::send_ack(const Digest& message_id, uint64_t time) {
    auto ret = return_path(forward_relays_[message_id], scenario_.topo,
                           policy_.min_relays_per_path, rng_);
    if (!ret) {
        metrics_.acks_suppressed++;
        return;
    }
    return_relays_[message_id].insert(ret->relays.begin(), ret->relays.end());

    Clove clove;
    clove.destination = ret->exit;  // the overlay entry node
    clove.clove_id = 0;
    clove.sent_at = time;
    clove.payload = to_bytes(kAckMagic + hex_encode(message_id));
    OnionPacket onion = packet::build_onion(
        packet::bundle({clove}), *ret, node_public_keys(), policy_.cell_size,
        det_seed(seed_, message_id, "ack", 0));

    Event pkt;
    pkt.time = time + scenario_.topo.latency(ret->entry, ret->relays.front());
    pkt.from = ret->entry;
    pkt.to = ret->relays.front();
    pkt.kind = "pkt";
    pkt.data = onion.serialize(policy_.cell_size);
    enqueue(pkt.time, std::move(pkt));
    metrics_.acks_sent++;
}

void Runner::deliver_message(const Digest& message_id, uint64_t time) {
    auto& pending = pending_[message_id];
    Bytes message = packet::reassemble(pending.chunks);
    pending_.erase(message_id);
    Transaction final_tx = Transaction::full_deserialize(message);
    metrics_.delivered++;

    if (pam_.claim_broadcast(message_id)) {
        peg::PegProof burn = bridge_.burn_on_side(side_, final_tx.sender,
                                                  final_tx.amount, final_tx.receiver,
                                                  time);
        Transaction release = bridge_.release_on_core(
            core_, burn, side_, final_tx.sender, final_tx.pseudonymized);
        core_.seal_block(time);
        metrics_.broadcasts++;

        truth_[message_id].final_tx_id = release.tx_id;
        // Logged from the exit node: the hand-off to PAM and the broadcast
        // happen at the same tick, and this is what an exit-adjacent
        // vantage point can see.
        trace_.events.push_back(Event{time, scenario_.topo.exit_node(), "core",
                                      "broadcast", release.full_serialize()});
    }

    if (scenario_.acks) send_ack(message_id, time);
}

void Runner::handle_pkt(const Event& e) {
    const auto& node = scenario_.topo.node(e.to);
    // Relays keep a seen-digest set; duplicates are forwarded once.
    if (!seen_at_relay_[e.to].insert(crypto::hash(e.data)).second) {
        metrics_.replays_suppressed++;
        return;
    }
    OnionPacket onion;
    packet::Peeled peeled;
    try {
        onion = OnionPacket::deserialize(e.data);
        peeled = packet::peel(onion, node.keypair.secret_key);
    } catch (const std::exception&) {
        metrics_.drops++;
        return;
    }

    if (auto* hop = std::get_if<packet::RelayHop>(&peeled)) {
        if (!scenario_.topo.has_node(hop->next_hop) ||
            !scenario_.topo.has_link(e.to, hop->next_hop)) {
            metrics_.drops++;
            return;
        }
        Event fwd;
        fwd.time = e.time + scenario_.topo.latency(e.to, hop->next_hop);
        fwd.from = e.to;
        fwd.to = hop->next_hop;
        fwd.kind = "pkt";
        fwd.data = hop->inner.serialize(policy_.cell_size);
        enqueue(fwd.time, std::move(fwd));
        return;
    }

    const auto& bulb = std::get<packet::TerminalBulb>(peeled).bulb;
    for (const auto& clove : bulb.cloves) {
        std::string text = to_string(clove.payload);
        if (text.rfind(kAckMagic, 0) == 0) {
            metrics_.acks_received++;
            continue;
        }
        Chunk chunk = Chunk::deserialize(clove.payload);
        auto& pending = pending_[chunk.message_id];
        pending.total = chunk.total;
        pending.chunks.push_back(chunk);
        if (pending.chunks.size() == pending.total)
            deliver_message(chunk.message_id, e.time);
    }
}

ScenarioResult Runner::run() {
    const NodeId entry = scenario_.topo.entry_node();
    const Bytes entry_pk = scenario_.topo.node(entry).keypair.public_key;

    for (size_t i = 0; i < scenario_.txs.size(); ++i) {
        const ScenarioTx& stx = scenario_.txs[i];
        auto keys = actor_keys(stx.sender);
        Transaction tx = chain::make_transfer(
            chain::address_of(keys.public_key), actor_address(stx.receiver),
            stx.amount, stx.asset, stx.payload, keys.secret_key);
        Digest salt = crypto::hash(tx.full_serialize());
        Bytes cell = wrap_cell(
            crypto::seal(tx.full_serialize(), entry_pk, det_seed(seed_, salt, "submit", i))
                .serialize(),
            policy_.cell_size);
        Event submit;
        submit.time = stx.at;
        submit.from = "client:" + stx.sender;
        submit.to = entry;
        submit.kind = "submit";
        submit.data = std::move(cell);
        enqueue(stx.at, std::move(submit));
        metrics_.submitted++;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (!queue_.empty()) {
        QueuedEvent qe = queue_.top();
        queue_.pop();
        const Event& e = qe.event;
        if (sidechain_dead(e.time)) {
            metrics_.lost++;
            continue;
        }
        if (e.kind == "pkt" && scenario_.faults.packet_loss > 0.0 &&
            unit(rng_) < scenario_.faults.packet_loss) {
            metrics_.lost++;
            continue;
        }
        trace_.events.push_back(e);
        if (e.kind == "submit")
            handle_submit(e);
        else if (e.kind == "pkt")
            handle_pkt(e);
    }

    ScenarioResult result{std::move(core_), std::move(side_), std::move(trace_),
                          metrics_, std::move(truth_), std::move(forward_relays_),
                          std::move(return_relays_), pam_.audit_store()};
    return result;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, const pam::Policy& policy,
                            uint64_t seed) {
    policy.validate();
    Runner runner(scenario, policy, seed);
    return runner.run();
}

ScenarioResult run_direct(const Scenario& scenario, uint64_t seed) {
    std::map<chain::Address, uint64_t> alloc;
    for (const auto& [name, amount] : scenario.balances)
        alloc[actor_address(name)] += amount;
    ScenarioResult result{chain::Ledger("core", alloc), chain::Ledger("side", {}),
                          {}, {}, {}, {}, {}, {}};
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);

    std::vector<size_t> order(scenario.txs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scenario.txs[a].at < scenario.txs[b].at;
    });

    for (size_t i : order) {
        const ScenarioTx& stx = scenario.txs[i];
        auto keys = actor_keys(stx.sender);
        Transaction tx = chain::make_transfer(
            chain::address_of(keys.public_key), actor_address(stx.receiver),
            stx.amount, stx.asset, stx.payload, keys.secret_key);
        result.metrics.submitted++;
        result.core.submit_transaction(tx, keys.public_key);
        result.core.seal_block(stx.at);
        result.metrics.broadcasts++;
        result.metrics.delivered++;
        result.trace.events.push_back(Event{stx.at, "client:" + stx.sender, "core",
                                            "plain", tx.full_serialize()});
        FlowTruth truth;
        truth.final_tx_id = tx.tx_id;
        truth.sender_client = "client:" + stx.sender;
        truth.receiver = tx.receiver;
        truth.real_sender = tx.sender;
        result.truth.emplace(crypto::hash(tx.full_serialize()), truth);
    }
    (void)rng;
    return result;
}

}  // namespace gor::sim
