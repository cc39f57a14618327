#include "gor/pam.hpp"

#include <algorithm>

namespace gor::pam {

using chain::SmartContract;
using chain::Transaction;

void Policy::validate() const {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (min_relays_per_path < 1)
        throw std::invalid_argument("min_relays_per_path must be >= 1");
    if (cell_size < 256) throw std::invalid_argument("cell_size too small");
    if (linkability_threshold < 0.0 || linkability_threshold > 1.0)
        throw std::invalid_argument("linkability_threshold outside [0,1]");
    for (const auto& f : recorded_fields)
        if (!chain::transaction_field_names().count(f))
            throw std::invalid_argument("unknown transaction field: " + f);
    if (pseudonymize && recorded_fields.count("payload"))
        throw std::invalid_argument(
            "recorded_fields may not include payload while pseudonymize is on");
}

const std::set<std::string>& routing_fields() {
    static const std::set<std::string> fields = {"tx_id", "receiver", "asset"};
    return fields;
}

bool check_contract(const Policy& policy, const SmartContract& sc) {
    if (sc.quarantined) return false;
    if (sc.relay_public_key.size() != crypto::kPublicKeySize) return false;
    for (const auto& f : sc.allowed_fields) {
        if (!policy.recorded_fields.count(f) && !routing_fields().count(f))
            return false;
    }
    return true;
}

SmartContract modify_contract(const Policy& policy, const SmartContract& sc) {
    SmartContract out = sc;
    switch (policy.untrusted_action) {
        case UntrustedAction::strip_fields: {
            std::set<std::string> kept;
            for (const auto& f : sc.allowed_fields)
                if (policy.recorded_fields.count(f) || routing_fields().count(f))
                    kept.insert(f);
            out.allowed_fields = std::move(kept);
            break;
        }
        case UntrustedAction::quarantine:
            out.quarantined = true;
            break;
    }
    out.trusted = check_contract(policy, out);
    return out;
}

AuditRecord record_fields(const Policy& policy, const Transaction& tx) {
    AuditRecord rec;
    rec.tx_id = tx.tx_id;
    for (const auto& f : policy.recorded_fields) {
        std::string value;
        if (f == "tx_id") value = hex_encode(tx.tx_id);
        else if (f == "kind") value = chain::tx_kind_name(tx.kind);
        else if (f == "sender") value = hex_encode(tx.sender);
        else if (f == "receiver") value = hex_encode(tx.receiver);
        else if (f == "amount") value = std::to_string(tx.amount);
        else if (f == "asset") value = tx.asset;
        else if (f == "payload") value = hex_encode(tx.payload);
        else if (f == "signature") value = hex_encode(tx.signature.bytes);
        else if (f == "pseudonymized") value = tx.pseudonymized ? "true" : "false";
        else throw std::invalid_argument("unknown transaction field: " + f);
        rec.recorded.emplace(f, std::move(value));
    }
    return rec;
}

Policy update_policy(const Policy& policy, double measured_linkability,
                     uint32_t max_paths, uint32_t max_relays) {
    Policy out = policy;
    if (measured_linkability > policy.linkability_threshold) {
        out.n_paths = std::min(policy.n_paths + 1, std::max(max_paths, 1u));
        out.min_relays_per_path =
            std::min(policy.min_relays_per_path + 1, std::max(max_relays, 1u));
    }
    return out;
}

Pam::Pam(Policy policy) : policy_(std::move(policy)) { policy_.validate(); }

void Pam::set_policy(Policy p) {
    p.validate();
    policy_ = std::move(p);
}

const SmartContract& Pam::register_contract(SmartContract sc) {
    sc.trusted = check_contract(policy_, sc);
    if (!sc.trusted) sc = modify_contract(policy_, sc);
    auto [it, _] = contracts_.insert_or_assign(sc.contract_id, std::move(sc));
    return it->second;
}

bool Pam::routable_contract(const Digest& contract_id) const {
    auto it = contracts_.find(contract_id);
    return it != contracts_.end() && it->second.trusted && !it->second.quarantined;
}

PolicyDecision Pam::evaluate(const Transaction& tx, const topology::Topology& topo,
                             uint64_t seed) const {
    ByteWriter w;
    w.u64(seed);
    w.raw(tx.tx_id);
    Digest mix = crypto::hash(w.take());
    std::mt19937_64 rng(ByteReader(Bytes(mix.begin(), mix.end())).u64());

    auto relay_ok = [&](const NodeId& id) {
        return routable_contract(topo.node(id).contract_id);
    };
    auto paths = topo.disjoint_paths(topo.entry_node(), topo.exit_node(),
                                     policy_.n_paths, policy_.min_relays_per_path,
                                     relay_ok, rng);
    if (paths.empty())
        throw std::runtime_error("policy unsatisfiable: topology cannot provide " +
                                 std::to_string(policy_.n_paths) +
                                 " disjoint paths");

    PolicyDecision d;
    d.paths = std::move(paths);
    d.n_chunks = policy_.n_paths;
    ByteWriter nw;
    nw.u64(seed);
    nw.raw(tx.tx_id);
    nw.str("session-nonce");
    Digest nonce = crypto::hash(nw.take());
    d.session_nonce.assign(nonce.begin(), nonce.end());
    return d;
}

Transaction Pam::hide_identity(const Transaction& tx, const Bytes& session_nonce) {
    if (!policy_.pseudonymize)
        throw std::logic_error("hide_identity requires the pseudonymize flag");
    ByteWriter w;
    w.raw(tx.sender);
    w.raw(session_nonce);
    Digest pseudonym = crypto::hash(w.take());

    Transaction out = tx;
    out.sender = pseudonym;
    out.signature = {};
    out.pseudonymized = true;
    out.tx_id = out.compute_id();

    AuditRecord rec;
    rec.tx_id = tx.tx_id;
    rec.pseudonym_map.emplace(pseudonym, tx.sender);
    audit_store_.push_back(std::move(rec));
    return out;
}

void Pam::store_audit(AuditRecord record) { audit_store_.push_back(std::move(record)); }

std::map<std::pair<size_t, size_t>, SmartContract> Pam::allocate_relays(
    const topology::Topology& topo, const PolicyDecision& decision,
    bool allow_reuse) const {
    std::map<std::pair<size_t, size_t>, SmartContract> out;
    std::set<Digest> used;
    for (size_t p = 0; p < decision.paths.size(); ++p) {
        const auto& relays = decision.paths[p].relays;
        for (size_t h = 0; h < relays.size(); ++h) {
            const auto& node = topo.node(relays[h]);
            auto it = contracts_.find(node.contract_id);
            if (it == contracts_.end() || !it->second.trusted ||
                it->second.quarantined)
                throw std::runtime_error("insufficient trusted relays");
            if (!allow_reuse && !used.insert(node.contract_id).second)
                throw std::runtime_error("insufficient trusted relays");
            out.emplace(std::make_pair(p, h), it->second);
        }
    }
    return out;
}

bool Pam::claim_broadcast(const Digest& message_id) {
    return broadcast_seen_.insert(message_id).second;
}

bool Pam::broadcast_final(chain::Ledger& core, const Transaction& tx,
                          const Digest& message_id, const Bytes& sender_public) {
    if (!claim_broadcast(message_id)) return false;
    core.submit_transaction(tx, sender_public);
    return true;
}

}  // namespace gor::pam
