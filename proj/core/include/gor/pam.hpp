#ifndef GOR_PAM_HPP
#define GOR_PAM_HPP

#include "gor/peg.hpp"
#include "gor/topology.hpp"

namespace gor::pam {

using packet::NodeId;
using packet::PathSpec;

enum class UntrustedAction { quarantine, strip_fields };

struct Policy {
    uint32_t n_paths = 1;
    uint32_t min_relays_per_path = 1;
    size_t cell_size = packet::kDefaultCellSize;
    std::set<std::string> recorded_fields;
    bool pseudonymize = true;
    UntrustedAction untrusted_action = UntrustedAction::quarantine;
    double linkability_threshold = 0.5;

    void validate() const;
};

struct PolicyDecision {
    std::vector<PathSpec> paths;  // one per chunk, pairwise relay-disjoint
    uint32_t n_chunks = 1;
    Bytes session_nonce;  // 32 bytes
};

struct AuditRecord {
    Digest tx_id{};
    std::map<std::string, std::string> recorded;
    // pseudonym -> real sender; PAM-private, never exported
    std::map<Digest, chain::Address> pseudonym_map;
};

// Fields a relay contract may see regardless of policy, because routing
// and delivery need them.
const std::set<std::string>& routing_fields();

bool check_contract(const Policy& policy, const chain::SmartContract& sc);
chain::SmartContract modify_contract(const Policy& policy,
                                     const chain::SmartContract& sc);

AuditRecord record_fields(const Policy& policy, const chain::Transaction& tx);

// Pure escalation rule: one step up on both knobs when measured
// linkability exceeds the threshold, saturating at the topology maxima.
Policy update_policy(const Policy& policy, double measured_linkability,
                     uint32_t max_paths, uint32_t max_relays);

// The Privacy Assurance Module: a single logical actor owning the policy,
// the vetted contract registry, the private audit store, and broadcast
// dedup state.
class Pam {
public:
    explicit Pam(Policy policy);

    const Policy& policy() const { return policy_; }
    void set_policy(Policy p);

    // Vets (and per policy, modifies) a contract before registering it.
    const chain::SmartContract& register_contract(chain::SmartContract sc);
    const std::map<Digest, chain::SmartContract>& contracts() const {
        return contracts_;
    }
    bool routable_contract(const Digest& contract_id) const;

    // Deterministic in (policy, tx, topology, seed); throws
    // "policy unsatisfiable" when the topology cannot provide the paths.
    PolicyDecision evaluate(const chain::Transaction& tx,
                            const topology::Topology& topo, uint64_t seed) const;

    // Replaces the sender with hash(sender || session_nonce), drops the
    // signature, and stores the reverse mapping privately.
    chain::Transaction hide_identity(const chain::Transaction& tx,
                                     const Bytes& session_nonce);

    void store_audit(AuditRecord record);
    const std::vector<AuditRecord>& audit_store() const { return audit_store_; }

    // Binds every hop of every path to its node's trusted contract.
    std::map<std::pair<size_t, size_t>, chain::SmartContract> allocate_relays(
        const topology::Topology& topo, const PolicyDecision& decision,
        bool allow_reuse = false) const;

    // At-most-once broadcast per message id; returns true when submitted.
    bool broadcast_final(chain::Ledger& core, const chain::Transaction& tx,
                         const Digest& message_id, const Bytes& sender_public = {});

    // Dedup gate for callers that build the final core transaction through
    // the peg bridge; true exactly once per message id.
    bool claim_broadcast(const Digest& message_id);

private:
    Policy policy_;
    std::map<Digest, chain::SmartContract> contracts_;
    std::vector<AuditRecord> audit_store_;
    std::set<Digest> broadcast_seen_;
};

}  // namespace gor::pam

#endif
