#ifndef GOR_CHAIN_HPP
#define GOR_CHAIN_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gor/crypto.hpp"

namespace gor::chain {

using Address = Digest;  // hash of the account's public key

Address address_of(const Bytes& public_key);
Address zero_address();

enum class TxKind : uint8_t {
    genesis = 0,
    transfer = 1,
    peg_lock = 2,
    peg_mint = 3,
    peg_burn = 4,
    peg_release = 5,
};

std::string tx_kind_name(TxKind k);
TxKind tx_kind_from_name(const std::string& s);

struct Transaction {
    Digest tx_id{};
    TxKind kind = TxKind::transfer;
    Address sender{};
    Address receiver{};
    uint64_t amount = 0;
    std::string asset = "tok";
    Bytes payload;  // opaque details of the transferred asset
    crypto::Signature signature;
    bool pseudonymized = false;

    // Everything except tx_id and signature, in fixed field order.
    Bytes canonical_bytes() const;
    Digest compute_id() const;

    // Complete wire form, including tx_id and signature.
    Bytes full_serialize() const;
    static Transaction full_deserialize(const Bytes& b);
};

Transaction make_transfer(const Address& sender, const Address& receiver,
                          uint64_t amount, const std::string& asset,
                          const Bytes& payload, const Bytes& sender_secret);

struct Block {
    uint64_t height = 0;
    Digest prev_hash{};
    Digest tx_root{};
    uint64_t timestamp = 0;
    std::vector<Transaction> txs;

    Digest block_hash() const;
    static Digest compute_tx_root(const std::vector<Transaction>& txs);
};

// Declarative relay descriptor; no executable bytecode.
struct SmartContract {
    Digest contract_id{};
    Bytes relay_public_key;
    std::set<std::string> allowed_fields;
    bool trusted = false;
    bool quarantined = false;
};

const std::set<std::string>& transaction_field_names();

// Single-writer append-only ledger with an account balance model.
class Ledger {
public:
    Ledger(std::string chain_id, const std::map<Address, uint64_t>& genesis_alloc);

    const std::string& chain_id() const { return chain_id_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::deque<Transaction>& mempool() const { return mempool_; }

    uint64_t balance(const Address& a) const;
    uint64_t locked(const Address& a) const;
    uint64_t total_balance() const;
    uint64_t total_locked() const;

    // Queues a transaction after checking signature/pseudonym rules,
    // funds (including earlier queued spends) and tx_id uniqueness.
    void submit_transaction(const Transaction& tx, const Bytes& sender_public = {});

    // Moves the whole mempool into a new block and applies it atomically.
    const Block& seal_block(uint64_t timestamp);

    // nullopt when the chain replays cleanly; otherwise the first violation.
    std::optional<std::string> validate_chain() const;

    // Newline-delimited JSON, one block per line.
    std::string export_ndjson() const;
    static Ledger import_ndjson(const std::string& chain_id, const std::string& text);

private:
    uint64_t effective_balance(const Address& a) const;
    void apply_tx(std::map<Address, uint64_t>& balances,
                  std::map<Address, uint64_t>& locked, const Transaction& tx) const;
    static void drain_locked(std::map<Address, uint64_t>& locked, uint64_t amount);

    std::string chain_id_;
    std::vector<Block> blocks_;
    std::deque<Transaction> mempool_;
    std::map<Address, uint64_t> balances_;
    std::map<Address, uint64_t> locked_;
    std::set<Digest> seen_tx_ids_;
};

}  // namespace gor::chain

#endif
