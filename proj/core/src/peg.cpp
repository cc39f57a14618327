#include "gor/peg.hpp"

#include <sstream>

namespace gor::peg {

using chain::Address;
using chain::Ledger;
using chain::Transaction;
using chain::TxKind;

Digest PegProof::compute_digest(const Digest& source_block_hash) const {
    ByteWriter w;
    w.u8(static_cast<uint8_t>(direction));
    w.raw(source_tx);
    w.u64(source_block);
    w.u64(amount);
    w.raw(beneficiary);
    w.raw(source_block_hash);
    return crypto::hash(w.take());
}

std::string PegProof::serialize_hex() const {
    std::ostringstream out;
    out << (direction == Direction::core_to_side ? "core_to_side" : "side_to_core")
        << " " << hex_encode(source_tx) << " " << source_block << " " << amount
        << " " << hex_encode(beneficiary) << " " << hex_encode(proof_digest);
    return out.str();
}

PegProof PegProof::deserialize_hex(const std::string& text) {
    std::istringstream in(text);
    std::string dir, src, ben, dig;
    PegProof p;
    if (!(in >> dir >> src >> p.source_block >> p.amount >> ben >> dig))
        throw std::invalid_argument("malformed peg proof");
    if (dir == "core_to_side")
        p.direction = Direction::core_to_side;
    else if (dir == "side_to_core")
        p.direction = Direction::side_to_core;
    else
        throw std::invalid_argument("bad peg direction: " + dir);
    auto digest32 = [](const std::string& s) {
        Bytes b = hex_decode(s);
        if (b.size() != 32) throw std::invalid_argument("bad digest length");
        Digest d;
        std::copy(b.begin(), b.end(), d.begin());
        return d;
    };
    p.source_tx = digest32(src);
    p.beneficiary = digest32(ben);
    p.proof_digest = digest32(dig);
    return p;
}

void PegBridge::verify_against_source(const PegProof& proof, const Ledger& source,
                                      Direction expected) {
    if (proof.direction != expected)
        throw std::invalid_argument("peg proof has wrong direction");
    if (proof.amount == 0) throw std::invalid_argument("peg amount must be positive");
    if (proof.source_block >= source.blocks().size())
        throw std::invalid_argument("peg proof references unknown block");
    const chain::Block& block = source.blocks()[proof.source_block];
    const TxKind want =
        expected == Direction::core_to_side ? TxKind::peg_lock : TxKind::peg_burn;
    bool found = false;
    for (const auto& tx : block.txs) {
        if (tx.tx_id == proof.source_tx && tx.kind == want &&
            tx.amount == proof.amount) {
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("peg proof source tx not found");
    if (proof.proof_digest != proof.compute_digest(block.block_hash()))
        throw std::invalid_argument("peg proof digest mismatch");
}

void PegBridge::consume(const PegProof& proof) {
    if (!consumed_.insert(proof.proof_digest).second)
        throw std::invalid_argument("peg proof already consumed");
}

PegProof PegBridge::lock_on_core(Ledger& core, const Address& from, uint64_t amount,
                                 const Address& beneficiary, uint64_t timestamp) {
    if (amount == 0) throw std::invalid_argument("cannot lock zero");
    Transaction tx;
    tx.kind = TxKind::peg_lock;
    tx.sender = from;
    tx.receiver = beneficiary;
    tx.amount = amount;
    tx.asset = "tok";
    // Salt with the lock height so repeated identical locks stay unique.
    {
        ByteWriter w;
        w.u64(core.blocks().size());
        w.u64(timestamp);
        tx.payload = w.take();
    }
    tx.tx_id = tx.compute_id();
    core.submit_transaction(tx);
    const chain::Block& block = core.seal_block(timestamp);

    PegProof proof;
    proof.direction = Direction::core_to_side;
    proof.source_tx = tx.tx_id;
    proof.source_block = block.height;
    proof.amount = amount;
    proof.beneficiary = beneficiary;
    proof.proof_digest = proof.compute_digest(block.block_hash());
    return proof;
}

Transaction PegBridge::mint_on_side(Ledger& side, const PegProof& proof,
                                    const Ledger& core) {
    verify_against_source(proof, core, Direction::core_to_side);
    consume(proof);
    Transaction tx;
    tx.kind = TxKind::peg_mint;
    tx.sender = chain::zero_address();
    tx.receiver = proof.beneficiary;
    tx.amount = proof.amount;
    tx.asset = "tok";
    tx.payload = Bytes(proof.proof_digest.begin(), proof.proof_digest.end());
    tx.tx_id = tx.compute_id();
    side.submit_transaction(tx);
    return tx;
}

PegProof PegBridge::burn_on_side(Ledger& side, const Address& from, uint64_t amount,
                                 const Address& beneficiary, uint64_t timestamp) {
    if (amount == 0) throw std::invalid_argument("cannot burn zero");
    Transaction tx;
    tx.kind = TxKind::peg_burn;
    tx.sender = from;
    tx.receiver = beneficiary;
    tx.amount = amount;
    tx.asset = "tok";
    {
        ByteWriter w;
        w.u64(side.blocks().size());
        w.u64(timestamp);
        tx.payload = w.take();
    }
    tx.tx_id = tx.compute_id();
    side.submit_transaction(tx);
    const chain::Block& block = side.seal_block(timestamp);

    PegProof proof;
    proof.direction = Direction::side_to_core;
    proof.source_tx = tx.tx_id;
    proof.source_block = block.height;
    proof.amount = amount;
    proof.beneficiary = beneficiary;
    proof.proof_digest = proof.compute_digest(block.block_hash());
    return proof;
}

Transaction PegBridge::release_on_core(Ledger& core, const PegProof& proof,
                                       const Ledger& side,
                                       const Address& sender_alias,
                                       bool pseudonymized) {
    verify_against_source(proof, side, Direction::side_to_core);
    consume(proof);
    Transaction tx;
    tx.kind = TxKind::peg_release;
    tx.sender = sender_alias;
    tx.pseudonymized = pseudonymized;
    tx.receiver = proof.beneficiary;
    tx.amount = proof.amount;
    tx.asset = "tok";
    tx.payload = Bytes(proof.proof_digest.begin(), proof.proof_digest.end());
    tx.tx_id = tx.compute_id();
    core.submit_transaction(tx);
    return tx;
}

}  // namespace gor::peg
