#ifndef GOR_PACKET_HPP
#define GOR_PACKET_HPP

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "gor/crypto.hpp"

namespace gor::packet {

using NodeId = std::string;

constexpr size_t kDefaultCellSize = 2048;
constexpr size_t kMaxPathLength = 8;  // relays per path, excluding the exit layer

// One fragment of a message split for multi-path transfer.
struct Chunk {
    Digest message_id{};  // hash of the whole message
    uint32_t index = 0;
    uint32_t total = 1;
    Bytes payload;

    Bytes serialize() const;
    static Chunk deserialize(const Bytes& b);
};

// One bundled message hanging off a garlic bulb.
struct Clove {
    NodeId destination;
    uint64_t clove_id = 0;
    uint64_t sent_at = 0;  // simulation ticks
    Bytes payload;

    bool operator==(const Clove&) const = default;
};

struct GarlicBulb {
    std::vector<Clove> cloves;

    Bytes serialize() const;
    static GarlicBulb deserialize(const Bytes& b);
    bool operator==(const GarlicBulb&) const = default;
};

// A nested layered-encryption envelope. In memory only the current
// outermost sealed layer is held; next_hop and the inner packet are
// revealed by peeling with the right hop key.
//
// Wire image (always exactly cell_size bytes):
//   u32 box_len | sealed box bytes | zero fill
struct OnionPacket {
    Bytes box_bytes;  // serialized SealedBox of the outermost layer

    Bytes serialize(size_t cell_size) const;
    static OnionPacket deserialize(const Bytes& wire);
};

struct PathSpec {
    NodeId entry;
    std::vector<NodeId> relays;
    NodeId exit;

    // entry -> relays... -> exit
    std::vector<NodeId> all_nodes() const;
    bool operator==(const PathSpec&) const = default;
};

struct RelayHop {
    NodeId next_hop;
    OnionPacket inner;
};
struct TerminalBulb {
    GarlicBulb bulb;
};
using Peeled = std::variant<RelayHop, TerminalBulb>;

// Fixed split rule: with L = message length, q = L/n, r = L%n, the first r
// chunks carry q+1 bytes and the rest carry q bytes.
std::vector<Chunk> chunk_message(const Bytes& message, uint32_t n);

// Order-independent; verifies the message digest.
Bytes reassemble(std::vector<Chunk> chunks);

GarlicBulb bundle(std::vector<Clove> cloves);
std::vector<Clove> unbundle(const GarlicBulb& bulb);

// Layers are built innermost-first: the terminal layer is sealed to the
// exit, each outer layer to the preceding relay and names the next hop.
// ephemeral_seed, when non-empty, derives per-layer ephemeral keys for
// reproducible packet bytes.
OnionPacket build_onion(const GarlicBulb& bulb, const PathSpec& path,
                        const std::map<NodeId, Bytes>& keys, size_t cell_size,
                        const Bytes& ephemeral_seed = {});

// Pure: wrong key or malformed input throws, indistinguishably.
Peeled peel(const OnionPacket& packet, const Bytes& secret_key);

// Largest bulb serialization build_onion accepts for a given path length.
size_t max_bulb_size(size_t path_relays, size_t cell_size);

}  // namespace gor::packet

#endif
