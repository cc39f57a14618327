#ifndef GOR_PEG_HPP
#define GOR_PEG_HPP

#include "gor/chain.hpp"

namespace gor::peg {

enum class Direction : uint8_t { core_to_side = 0, side_to_core = 1 };

struct PegProof {
    Direction direction = Direction::core_to_side;
    Digest source_tx{};
    uint64_t source_block = 0;
    uint64_t amount = 0;
    chain::Address beneficiary{};
    Digest proof_digest{};  // binds all fields plus the source block hash

    Digest compute_digest(const Digest& source_block_hash) const;
    std::string serialize_hex() const;
    static PegProof deserialize_hex(const std::string& text);
};

// Tracks consumed proofs; each proof authorizes exactly one mint/release.
class PegBridge {
public:
    // Moves amount from free to locked on core, seals the lock in a block,
    // and issues a proof for minting on the side chain.
    PegProof lock_on_core(chain::Ledger& core, const chain::Address& from,
                          uint64_t amount, const chain::Address& beneficiary,
                          uint64_t timestamp);

    // Verifies the proof against the core ledger and credits the beneficiary
    // on the side chain. The minted tx stays in the side mempool.
    chain::Transaction mint_on_side(chain::Ledger& side, const PegProof& proof,
                                    const chain::Ledger& core);

    PegProof burn_on_side(chain::Ledger& side, const chain::Address& from,
                          uint64_t amount, const chain::Address& beneficiary,
                          uint64_t timestamp);

    // sender_alias is informational only (the public record shows it as the
    // originator); value moves from the locked pool regardless.
    chain::Transaction release_on_core(chain::Ledger& core, const PegProof& proof,
                                       const chain::Ledger& side,
                                       const chain::Address& sender_alias = {},
                                       bool pseudonymized = false);

private:
    void consume(const PegProof& proof);
    static void verify_against_source(const PegProof& proof,
                                      const chain::Ledger& source,
                                      Direction expected);

    std::set<Digest> consumed_;
};

}  // namespace gor::peg

#endif
