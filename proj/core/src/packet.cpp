#include "gor/packet.hpp"

#include <algorithm>

namespace gor::packet {

namespace {
constexpr uint8_t kTagRelay = 0;
constexpr uint8_t kTagTerminal = 1;
constexpr size_t kWirePrefix = 4;  // u32 box length ahead of the zero fill
}  // namespace

Bytes Chunk::serialize() const {
    ByteWriter w;
    w.raw(message_id);
    w.u32(index);
    w.u32(total);
    w.blob(payload);
    return w.take();
}

Chunk Chunk::deserialize(const Bytes& b) {
    ByteReader r(b);
    Chunk c;
    c.message_id = r.digest32();
    c.index = r.u32();
    c.total = r.u32();
    c.payload = r.blob();
    if (r.remaining() != 0) throw std::runtime_error("trailing bytes after chunk");
    if (c.total < 1 || c.index >= c.total) throw std::runtime_error("chunk index out of range");
    return c;
}

static void write_clove(ByteWriter& w, const Clove& c) {
    w.str(c.destination);
    w.u64(c.clove_id);
    w.u64(c.sent_at);
    w.blob(c.payload);
}

static Clove read_clove(ByteReader& r) {
    Clove c;
    c.destination = r.str();
    c.clove_id = r.u64();
    c.sent_at = r.u64();
    c.payload = r.blob();
    if (c.payload.empty()) throw std::runtime_error("clove payload empty");
    return c;
}

Bytes GarlicBulb::serialize() const {
    if (cloves.empty()) throw std::invalid_argument("bulb must have at least one clove");
    ByteWriter w;
    w.u32(static_cast<uint32_t>(cloves.size()));
    for (const auto& c : cloves) {
        ByteWriter cw;
        write_clove(cw, c);
        w.blob(cw.take());
    }
    return w.take();
}

GarlicBulb GarlicBulb::deserialize(const Bytes& b) {
    ByteReader r(b);
    uint32_t count = r.u32();
    if (count == 0) throw std::runtime_error("bulb with zero cloves");
    GarlicBulb bulb;
    bulb.cloves.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        Bytes cb = r.blob();
        ByteReader cr(cb);
        bulb.cloves.push_back(read_clove(cr));
        if (cr.remaining() != 0) throw std::runtime_error("trailing bytes in clove");
    }
    if (r.remaining() != 0) throw std::runtime_error("trailing bytes after bulb");
    return bulb;
}

Bytes OnionPacket::serialize(size_t cell_size) const {
    ByteWriter w;
    w.blob(box_bytes);
    if (w.size() > cell_size)
        throw std::length_error("onion layer exceeds cell size");
    w.pad_zero_to(cell_size);
    return w.take();
}

OnionPacket OnionPacket::deserialize(const Bytes& wire) {
    ByteReader r(wire);
    OnionPacket p;
    p.box_bytes = r.blob();
    r.expect_zero_fill();
    return p;
}

std::vector<NodeId> PathSpec::all_nodes() const {
    std::vector<NodeId> out;
    out.push_back(entry);
    out.insert(out.end(), relays.begin(), relays.end());
    out.push_back(exit);
    return out;
}

std::vector<Chunk> chunk_message(const Bytes& message, uint32_t n) {
    if (n < 1) throw std::invalid_argument("chunk count must be >= 1");
    if (message.size() < n)
        throw std::invalid_argument("message shorter than chunk count");
    const Digest id = crypto::hash(message);
    const size_t q = message.size() / n;
    const size_t r = message.size() % n;
    std::vector<Chunk> chunks;
    chunks.reserve(n);
    size_t offset = 0;
    for (uint32_t i = 0; i < n; ++i) {
        const size_t len = q + (i < r ? 1 : 0);
        Chunk c;
        c.message_id = id;
        c.index = i;
        c.total = n;
        c.payload.assign(message.begin() + offset, message.begin() + offset + len);
        offset += len;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

Bytes reassemble(std::vector<Chunk> chunks) {
    if (chunks.empty()) throw std::invalid_argument("no chunks");
    const Digest id = chunks[0].message_id;
    const uint32_t total = chunks[0].total;
    for (const auto& c : chunks) {
        if (c.message_id != id) throw std::runtime_error("mixed message ids");
        if (c.total != total) throw std::runtime_error("inconsistent chunk totals");
    }
    std::vector<const Chunk*> by_index(total, nullptr);
    for (const auto& c : chunks) {
        if (by_index[c.index]) {
            if (by_index[c.index]->payload != c.payload)
                throw std::runtime_error("duplicate chunk index with conflicting payload");
            continue;
        }
        by_index[c.index] = &c;
    }
    for (uint32_t i = 0; i < total; ++i) {
        if (!by_index[i])
            throw std::runtime_error("incomplete: missing chunk index " + std::to_string(i));
    }
    Bytes message;
    for (uint32_t i = 0; i < total; ++i)
        message.insert(message.end(), by_index[i]->payload.begin(),
                       by_index[i]->payload.end());
    if (crypto::hash(message) != id)
        throw std::runtime_error("reassembled message digest mismatch");
    return message;
}

GarlicBulb bundle(std::vector<Clove> cloves) {
    if (cloves.empty()) throw std::invalid_argument("bundle: empty clove list");
    for (const auto& c : cloves)
        if (c.payload.empty()) throw std::invalid_argument("bundle: empty clove payload");
    return GarlicBulb{std::move(cloves)};
}

std::vector<Clove> unbundle(const GarlicBulb& bulb) {
    if (bulb.cloves.empty()) throw std::invalid_argument("unbundle: empty bulb");
    return bulb.cloves;
}

size_t max_bulb_size(size_t path_relays, size_t cell_size) {
    // Terminal layer: tag + u32 bulb length, sealed; each relay layer adds
    // its own header and seal overhead around the inner box bytes.
    constexpr size_t kMaxNodeId = 64;
    const size_t terminal_overhead = 1 + 4 + crypto::kSealOverhead;
    const size_t relay_overhead = 1 + 2 + kMaxNodeId + 4 + crypto::kSealOverhead;
    const size_t total = kWirePrefix + terminal_overhead + path_relays * relay_overhead;
    if (total >= cell_size) return 0;
    return cell_size - total;
}

OnionPacket build_onion(const GarlicBulb& bulb, const PathSpec& path,
                        const std::map<NodeId, Bytes>& keys, size_t cell_size,
                        const Bytes& ephemeral_seed) {
    if (path.relays.size() > kMaxPathLength)
        throw std::invalid_argument("path exceeds maximum length");
    auto key_for = [&](const NodeId& id) -> const Bytes& {
        auto it = keys.find(id);
        if (it == keys.end())
            throw std::invalid_argument("missing key for node " + id);
        return it->second;
    };
    auto layer_seed = [&](size_t depth) -> Bytes {
        if (ephemeral_seed.empty()) return {};
        ByteWriter w;
        w.raw(ephemeral_seed);
        w.u32(static_cast<uint32_t>(depth));
        Digest d = crypto::hash(w.take());
        return Bytes(d.begin(), d.end());
    };

    // Terminal layer, sealed to the exit.
    ByteWriter tw;
    tw.u8(kTagTerminal);
    tw.blob(bulb.serialize());
    Bytes box =
        crypto::seal(tw.take(), key_for(path.exit), layer_seed(path.relays.size()))
            .serialize();

    // Relay layers, innermost-first.
    for (size_t i = path.relays.size(); i-- > 0;) {
        const NodeId& next =
            (i + 1 < path.relays.size()) ? path.relays[i + 1] : path.exit;
        ByteWriter w;
        w.u8(kTagRelay);
        w.str(next);
        w.blob(box);
        box = crypto::seal(w.take(), key_for(path.relays[i]), layer_seed(i)).serialize();
    }

    if (box.size() + kWirePrefix > cell_size)
        throw std::length_error("bulb too large for cell size on this path");
    return OnionPacket{std::move(box)};
}

Peeled peel(const OnionPacket& packet, const Bytes& secret_key) {
    // All failures collapse into one error so a wrong key is
    // indistinguishable from malformed input.
    try {
        crypto::SealedBox box = crypto::SealedBox::deserialize(packet.box_bytes);
        Bytes plain = crypto::open(box, secret_key);
        ByteReader r(plain);
        uint8_t tag = r.u8();
        if (tag == kTagRelay) {
            RelayHop hop;
            hop.next_hop = r.str();
            hop.inner.box_bytes = r.blob();
            if (r.remaining() != 0) throw std::runtime_error("trailing bytes");
            return hop;
        }
        if (tag == kTagTerminal) {
            TerminalBulb t;
            t.bulb = GarlicBulb::deserialize(r.blob());
            if (r.remaining() != 0) throw std::runtime_error("trailing bytes");
            return t;
        }
        throw std::runtime_error("bad layer tag");
    } catch (const std::exception&) {
        throw std::runtime_error("peel failed");
    }
}

}  // namespace gor::packet
