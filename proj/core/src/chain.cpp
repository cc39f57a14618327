#include "gor/chain.hpp"

#include <sstream>

#include "json.hpp"

namespace gor::chain {

using ordered_json = nlohmann::ordered_json;

Address address_of(const Bytes& public_key) { return crypto::hash(public_key); }

Address zero_address() { return Address{}; }

std::string tx_kind_name(TxKind k) {
    switch (k) {
        case TxKind::genesis: return "genesis";
        case TxKind::transfer: return "transfer";
        case TxKind::peg_lock: return "peg_lock";
        case TxKind::peg_mint: return "peg_mint";
        case TxKind::peg_burn: return "peg_burn";
        case TxKind::peg_release: return "peg_release";
    }
    throw std::invalid_argument("bad tx kind");
}

TxKind tx_kind_from_name(const std::string& s) {
    if (s == "genesis") return TxKind::genesis;
    if (s == "transfer") return TxKind::transfer;
    if (s == "peg_lock") return TxKind::peg_lock;
    if (s == "peg_mint") return TxKind::peg_mint;
    if (s == "peg_burn") return TxKind::peg_burn;
    if (s == "peg_release") return TxKind::peg_release;
    throw std::invalid_argument("unknown tx kind: " + s);
}

const std::set<std::string>& transaction_field_names() {
    static const std::set<std::string> names = {
        "tx_id", "kind",    "sender",    "receiver",
        "amount", "asset",  "payload",   "signature",
        "pseudonymized"};
    return names;
}

Bytes Transaction::canonical_bytes() const {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(kind));
    w.raw(sender);
    w.raw(receiver);
    w.u64(amount);
    w.str(asset);
    w.blob(payload);
    w.u8(pseudonymized ? 1 : 0);
    return w.take();
}

Digest Transaction::compute_id() const { return crypto::hash(canonical_bytes()); }

Bytes Transaction::full_serialize() const {
    ByteWriter w;
    w.raw(tx_id);
    w.blob(signature.bytes);
    w.raw(canonical_bytes());
    return w.take();
}

Transaction Transaction::full_deserialize(const Bytes& b) {
    ByteReader r(b);
    Transaction tx;
    tx.tx_id = r.digest32();
    tx.signature.bytes = r.blob();
    tx.kind = static_cast<TxKind>(r.u8());
    tx.sender = r.digest32();
    tx.receiver = r.digest32();
    tx.amount = r.u64();
    tx.asset = r.str();
    tx.payload = r.blob();
    tx.pseudonymized = r.u8() != 0;
    if (r.remaining() != 0) throw std::runtime_error("trailing bytes after tx");
    if (tx.tx_id != tx.compute_id())
        throw std::runtime_error("tx_id mismatch in deserialized tx");
    return tx;
}

Transaction make_transfer(const Address& sender, const Address& receiver,
                          uint64_t amount, const std::string& asset,
                          const Bytes& payload, const Bytes& sender_secret) {
    Transaction tx;
    tx.kind = TxKind::transfer;
    tx.sender = sender;
    tx.receiver = receiver;
    tx.amount = amount;
    tx.asset = asset;
    tx.payload = payload;
    tx.tx_id = tx.compute_id();
    tx.signature = crypto::sign(tx.canonical_bytes(), sender_secret);
    return tx;
}

Digest Block::compute_tx_root(const std::vector<Transaction>& txs) {
    ByteWriter w;
    for (const auto& tx : txs) w.raw(tx.tx_id);
    Bytes b = w.take();
    return crypto::hash(b);
}

Digest Block::block_hash() const {
    ByteWriter w;
    w.u64(height);
    w.raw(prev_hash);
    w.raw(tx_root);
    w.u64(timestamp);
    return crypto::hash(w.take());
}

Ledger::Ledger(std::string chain_id, const std::map<Address, uint64_t>& genesis_alloc)
    : chain_id_(std::move(chain_id)) {
    Block genesis;
    genesis.height = 0;
    genesis.prev_hash = Digest{};
    genesis.timestamp = 0;
    for (const auto& [addr, amount] : genesis_alloc) {
        Transaction tx;
        tx.kind = TxKind::genesis;
        tx.sender = zero_address();
        tx.receiver = addr;
        tx.amount = amount;
        tx.tx_id = tx.compute_id();
        genesis.txs.push_back(std::move(tx));
    }
    genesis.tx_root = Block::compute_tx_root(genesis.txs);
    for (const auto& tx : genesis.txs) {
        balances_[tx.receiver] += tx.amount;
        seen_tx_ids_.insert(tx.tx_id);
    }
    blocks_.push_back(std::move(genesis));
}

uint64_t Ledger::balance(const Address& a) const {
    auto it = balances_.find(a);
    return it == balances_.end() ? 0 : it->second;
}

uint64_t Ledger::locked(const Address& a) const {
    auto it = locked_.find(a);
    return it == locked_.end() ? 0 : it->second;
}

uint64_t Ledger::total_balance() const {
    uint64_t t = 0;
    for (const auto& [_, v] : balances_) t += v;
    return t;
}

uint64_t Ledger::total_locked() const {
    uint64_t t = 0;
    for (const auto& [_, v] : locked_) t += v;
    return t;
}

uint64_t Ledger::effective_balance(const Address& a) const {
    // Current balance minus spends already queued in the mempool.
    uint64_t bal = balance(a);
    for (const auto& tx : mempool_) {
        bool debits = tx.sender == a &&
                      (tx.kind == TxKind::transfer || tx.kind == TxKind::peg_lock ||
                       tx.kind == TxKind::peg_burn);
        if (debits) bal = bal >= tx.amount ? bal - tx.amount : 0;
        if (tx.receiver == a &&
            (tx.kind == TxKind::transfer || tx.kind == TxKind::peg_mint ||
             tx.kind == TxKind::peg_release))
            bal += tx.amount;
    }
    return bal;
}

void Ledger::submit_transaction(const Transaction& tx, const Bytes& sender_public) {
    if (tx.kind == TxKind::genesis)
        throw std::invalid_argument("genesis transactions only exist in block 0");
    if (tx.tx_id != tx.compute_id())
        throw std::invalid_argument("tx_id does not match canonical serialization");
    if (seen_tx_ids_.count(tx.tx_id))
        throw std::invalid_argument("duplicate tx_id");

    if (tx.kind == TxKind::transfer && !tx.pseudonymized) {
        if (sender_public.empty() || address_of(sender_public) != tx.sender)
            throw std::invalid_argument("sender public key does not match address");
        if (!crypto::verify(tx.canonical_bytes(), tx.signature, sender_public))
            throw std::invalid_argument("bad transaction signature");
    }

    switch (tx.kind) {
        case TxKind::transfer:
        case TxKind::peg_lock:
        case TxKind::peg_burn:
            if (effective_balance(tx.sender) < tx.amount)
                throw std::invalid_argument("insufficient funds");
            break;
        case TxKind::peg_release: {
            uint64_t pending_release = 0;
            for (const auto& m : mempool_)
                if (m.kind == TxKind::peg_release) pending_release += m.amount;
            if (total_locked() < pending_release + tx.amount)
                throw std::invalid_argument("insufficient locked funds");
            break;
        }
        default:
            break;
    }

    seen_tx_ids_.insert(tx.tx_id);
    mempool_.push_back(tx);
}

void Ledger::drain_locked(std::map<Address, uint64_t>& locked, uint64_t amount) {
    // Deterministic: drain lockers in address order.
    for (auto it = locked.begin(); it != locked.end() && amount > 0;) {
        uint64_t take = std::min(it->second, amount);
        it->second -= take;
        amount -= take;
        if (it->second == 0)
            it = locked.erase(it);
        else
            ++it;
    }
    if (amount > 0) throw std::runtime_error("release exceeds locked funds");
}

void Ledger::apply_tx(std::map<Address, uint64_t>& balances,
                      std::map<Address, uint64_t>& locked,
                      const Transaction& tx) const {
    auto debit = [&](const Address& a, uint64_t amount) {
        auto it = balances.find(a);
        if (it == balances.end() || it->second < amount)
            throw std::runtime_error("balance would go negative");
        it->second -= amount;
    };
    switch (tx.kind) {
        case TxKind::genesis:
        case TxKind::peg_mint:
            balances[tx.receiver] += tx.amount;
            break;
        case TxKind::transfer:
            debit(tx.sender, tx.amount);
            balances[tx.receiver] += tx.amount;
            break;
        case TxKind::peg_lock:
            debit(tx.sender, tx.amount);
            locked[tx.sender] += tx.amount;
            break;
        case TxKind::peg_burn:
            debit(tx.sender, tx.amount);
            break;
        case TxKind::peg_release:
            drain_locked(locked, tx.amount);
            balances[tx.receiver] += tx.amount;
            break;
    }
}

const Block& Ledger::seal_block(uint64_t timestamp) {
    Block block;
    block.height = blocks_.back().height + 1;
    block.prev_hash = blocks_.back().block_hash();
    block.timestamp = timestamp;
    block.txs.assign(mempool_.begin(), mempool_.end());
    block.tx_root = Block::compute_tx_root(block.txs);
    mempool_.clear();
    for (const auto& tx : block.txs) apply_tx(balances_, locked_, tx);
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

std::optional<std::string> Ledger::validate_chain() const {
    if (blocks_.empty()) return "empty chain";
    std::map<Address, uint64_t> balances;
    std::map<Address, uint64_t> locked;
    for (size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        if (b.height != i)
            return "height gap at block " + std::to_string(i);
        if (i == 0) {
            if (b.prev_hash != Digest{}) return "genesis prev_hash not zero";
        } else if (b.prev_hash != blocks_[i - 1].block_hash()) {
            return "prev_hash violation at block " + std::to_string(i);
        }
        if (b.tx_root != Block::compute_tx_root(b.txs))
            return "tx_root mismatch at block " + std::to_string(i);
        for (const auto& tx : b.txs) {
            if (tx.tx_id != tx.compute_id())
                return "tx_id mismatch at block " + std::to_string(i);
            try {
                apply_tx(balances, locked, tx);
            } catch (const std::exception& e) {
                return std::string(e.what()) + " at block " + std::to_string(i);
            }
        }
    }
    // Replay must agree with the incrementally maintained state.
    for (const auto& [a, v] : balances)
        if (v != balance(a)) return "replayed balance disagrees with live balance";
    return std::nullopt;
}

static ordered_json tx_to_json(const Transaction& tx) {
    ordered_json j;
    j["tx_id"] = hex_encode(tx.tx_id);
    j["kind"] = tx_kind_name(tx.kind);
    j["sender"] = hex_encode(tx.sender);
    j["receiver"] = hex_encode(tx.receiver);
    j["amount"] = tx.amount;
    j["asset"] = tx.asset;
    j["payload"] = hex_encode(tx.payload);
    j["signature"] = hex_encode(tx.signature.bytes);
    j["pseudonymized"] = tx.pseudonymized;
    return j;
}

static Digest digest_from_hex(const std::string& s) {
    Bytes b = hex_decode(s);
    if (b.size() != 32) throw std::invalid_argument("digest must be 32 bytes");
    Digest d;
    std::copy(b.begin(), b.end(), d.begin());
    return d;
}

static Transaction tx_from_json(const ordered_json& j) {
    Transaction tx;
    tx.tx_id = digest_from_hex(j.at("tx_id").get<std::string>());
    tx.kind = tx_kind_from_name(j.at("kind").get<std::string>());
    tx.sender = digest_from_hex(j.at("sender").get<std::string>());
    tx.receiver = digest_from_hex(j.at("receiver").get<std::string>());
    tx.amount = j.at("amount").get<uint64_t>();
    tx.asset = j.at("asset").get<std::string>();
    tx.payload = hex_decode(j.at("payload").get<std::string>());
    tx.signature.bytes = hex_decode(j.at("signature").get<std::string>());
    tx.pseudonymized = j.at("pseudonymized").get<bool>();
    return tx;
}

std::string Ledger::export_ndjson() const {
    std::ostringstream out;
    for (const auto& b : blocks_) {
        ordered_json j;
        j["height"] = b.height;
        j["prev_hash"] = hex_encode(b.prev_hash);
        j["tx_root"] = hex_encode(b.tx_root);
        j["timestamp"] = b.timestamp;
        ordered_json txs = ordered_json::array();
        for (const auto& tx : b.txs) txs.push_back(tx_to_json(tx));
        j["txs"] = std::move(txs);
        out << j.dump() << "\n";
    }
    return out.str();
}

Ledger Ledger::import_ndjson(const std::string& chain_id, const std::string& text) {
    Ledger ledger(chain_id, {});
    ledger.blocks_.clear();
    ledger.balances_.clear();
    ledger.locked_.clear();
    ledger.seen_tx_ids_.clear();
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        Block b;
        b.height = j.at("height").get<uint64_t>();
        b.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
        b.tx_root = digest_from_hex(j.at("tx_root").get<std::string>());
        b.timestamp = j.at("timestamp").get<uint64_t>();
        for (const auto& tj : j.at("txs")) b.txs.push_back(tx_from_json(tj));
        for (const auto& tx : b.txs) {
            ledger.apply_tx(ledger.balances_, ledger.locked_, tx);
            ledger.seen_tx_ids_.insert(tx.tx_id);
        }
        ledger.blocks_.push_back(std::move(b));
    }
    if (ledger.blocks_.empty()) throw std::invalid_argument("empty ledger import");
    return ledger;
}

}  // namespace gor::chain
