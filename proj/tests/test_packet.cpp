#include <random>

#include "doctest.h"
#include "gor/packet.hpp"

using namespace gor;
using namespace gor::packet;

namespace {

Bytes random_bytes(std::mt19937_64& rng, size_t len) {
    Bytes out(len);
    for (auto& b : out) b = static_cast<uint8_t>(rng());
    return out;
}

std::map<NodeId, Bytes> keys_for(const PathSpec& path,
                                 std::map<NodeId, crypto::KeyPair>& out) {
    std::map<NodeId, Bytes> pks;
    for (const auto& id : path.all_nodes()) {
        if (!out.count(id)) {
            Digest d = crypto::hash_str("node:" + id);
            out[id] = crypto::keygen(Bytes(d.begin(), d.end()));
        }
        pks[id] = out[id].public_key;
    }
    return pks;
}

PathSpec make_path(size_t relays) {
    PathSpec p;
    p.entry = "entry";
    for (size_t i = 0; i < relays; ++i) p.relays.push_back("r" + std::to_string(i));
    p.exit = "exit";
    return p;
}

GarlicBulb peel_to_bulb(OnionPacket pkt, const PathSpec& path,
                        std::map<NodeId, crypto::KeyPair>& keys) {
    for (const auto& relay : path.relays) {
        auto peeled = peel(pkt, keys.at(relay).secret_key);
        auto& hop = std::get<RelayHop>(peeled);
        pkt = hop.inner;
    }
    auto final_peel = peel(pkt, keys.at(path.exit).secret_key);
    return std::get<TerminalBulb>(final_peel).bulb;
}

}  // namespace

TEST_CASE("chunk split rule") {
    Bytes msg = to_bytes("0123456789");

    auto one = chunk_message(msg, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].payload == msg);
    CHECK(one[0].message_id == crypto::hash(msg));

    auto three = chunk_message(msg, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0].payload.size() == 4);
    CHECK(three[1].payload.size() == 3);
    CHECK(three[2].payload.size() == 3);

    CHECK_THROWS(chunk_message(msg, 0));
    CHECK_THROWS(chunk_message(to_bytes("ab"), 3));
}

TEST_CASE("reassemble is order independent and tamper evident") {
    std::mt19937_64 rng(3);
    Bytes msg = random_bytes(rng, 57);
    auto chunks = chunk_message(msg, 5);

    std::shuffle(chunks.begin(), chunks.end(), rng);
    CHECK(reassemble(chunks) == msg);

    auto missing = chunks;
    missing.erase(std::find_if(missing.begin(), missing.end(),
                               [](const Chunk& c) { return c.index == 2; }));
    CHECK_THROWS_WITH_AS(reassemble(missing), "incomplete: missing chunk index 2",
                         std::runtime_error);

    auto tampered = chunks;
    tampered[0].payload[0] ^= 0xff;
    CHECK_THROWS(reassemble(tampered));
}

TEST_CASE("split/reassemble identity over random inputs") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        uint32_t n = 1 + rng() % 8;
        Bytes msg = random_bytes(rng, n + rng() % 200);
        CHECK(reassemble(chunk_message(msg, n)) == msg);
    }
}

TEST_CASE("bundle/unbundle round trips") {
    Clove one{"exit", 1, 0, to_bytes("hello")};
    auto bulb = bundle({one});
    CHECK(unbundle(GarlicBulb::deserialize(bulb.serialize())) ==
          std::vector<Clove>{one});

    std::vector<Clove> seven;
    for (uint64_t i = 0; i < 7; ++i)
        seven.push_back(Clove{"dest" + std::to_string(i % 3), i, i * 2,
                              to_bytes("payload-" + std::to_string(i))});
    auto big = bundle(seven);
    CHECK(unbundle(GarlicBulb::deserialize(big.serialize())) == seven);

    CHECK_THROWS(bundle({}));

    Bytes truncated = big.serialize();
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS(GarlicBulb::deserialize(truncated));
}

TEST_CASE("onion round trip on one relay plus exit") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(1);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 7, to_bytes("the clove")}});

    OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);
    auto first = peel(pkt, keys.at("r0").secret_key);
    auto& hop = std::get<RelayHop>(first);
    CHECK(hop.next_hop == "exit");
    auto second = peel(hop.inner, keys.at("exit").secret_key);
    CHECK(std::get<TerminalBulb>(second).bulb == bulb);
}

TEST_CASE("every layer serializes to exactly cell_size") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(4);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 0, to_bytes("uniform cells")}});

    OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);
    for (const auto& relay : path.relays) {
        CHECK(pkt.serialize(kDefaultCellSize).size() == kDefaultCellSize);
        pkt = std::get<RelayHop>(peel(pkt, keys.at(relay).secret_key)).inner;
    }
    CHECK(pkt.serialize(kDefaultCellSize).size() == kDefaultCellSize);
}

TEST_CASE("wrong hop key is rejected") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(2);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 0, to_bytes("secret")}});
    OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);

    CHECK_THROWS(peel(pkt, keys.at("r1").secret_key));
    CHECK_THROWS(peel(pkt, keys.at("exit").secret_key));
    CHECK_NOTHROW(peel(pkt, keys.at("r0").secret_key));

    // peel is pure: the same packet peels identically twice
    auto a = peel(pkt, keys.at("r0").secret_key);
    auto b = peel(pkt, keys.at("r0").secret_key);
    CHECK(std::get<RelayHop>(a).inner.box_bytes == std::get<RelayHop>(b).inner.box_bytes);
}

TEST_CASE("build_onion error paths") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(2);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 0, to_bytes("x")}});

    auto missing = pks;
    missing.erase("r1");
    CHECK_THROWS(build_onion(bulb, path, missing, kDefaultCellSize));

    auto oversize = bundle({Clove{"exit", 0, 0, Bytes(kDefaultCellSize, 0xab)}});
    CHECK_THROWS(build_onion(oversize, path, pks, kDefaultCellSize));

    PathSpec too_long = make_path(kMaxPathLength + 1);
    auto long_pks = keys_for(too_long, keys);
    CHECK_THROWS(build_onion(bulb, too_long, long_pks, kDefaultCellSize));
}

TEST_CASE("onion round trip property, paths of length 1..5") {
    std::mt19937_64 rng(17);
    std::map<NodeId, crypto::KeyPair> keys;
    for (int trial = 0; trial < 1000; ++trial) {
        PathSpec path = make_path(1 + rng() % 5);
        auto pks = keys_for(path, keys);
        std::vector<Clove> cloves;
        size_t n = 1 + rng() % 3;
        for (size_t i = 0; i < n; ++i)
            cloves.push_back(Clove{"exit", i, rng() % 1000,
                                   random_bytes(rng, 1 + rng() % 128)});
        auto bulb = bundle(cloves);
        OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);
        CHECK(peel_to_bulb(pkt, path, keys) == bulb);
    }
}

TEST_CASE("hop isolation: no 8-byte clove substring in non-terminal peels") {
    std::mt19937_64 rng(23);
    std::map<NodeId, crypto::KeyPair> keys;
    size_t violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        PathSpec path = make_path(1 + rng() % 4);
        auto pks = keys_for(path, keys);
        Bytes payload = random_bytes(rng, 32 + rng() % 64);
        auto bulb = bundle({Clove{"exit", 0, 0, payload}});
        OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);

        for (const auto& relay : path.relays) {
            auto hop = std::get<RelayHop>(peel(pkt, keys.at(relay).secret_key));
            const Bytes& inner = hop.inner.box_bytes;
            for (size_t i = 0; i + 8 <= payload.size(); ++i) {
                auto it = std::search(inner.begin(), inner.end(),
                                      payload.begin() + i, payload.begin() + i + 8);
                if (it != inner.end()) ++violations;
            }
            pkt = hop.inner;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("deterministic ephemeral seed reproduces packet bytes") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(2);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 1, to_bytes("golden")}});
    Bytes seed(32, 0x42);

    auto a = build_onion(bulb, path, pks, kDefaultCellSize, seed);
    auto b = build_onion(bulb, path, pks, kDefaultCellSize, seed);
    CHECK(a.box_bytes == b.box_bytes);

    auto c = build_onion(bulb, path, pks, kDefaultCellSize);
    auto d = build_onion(bulb, path, pks, kDefaultCellSize);
    CHECK(c.box_bytes != d.box_bytes);
}

TEST_CASE("onion wire framing rejects corrupted padding") {
    std::map<NodeId, crypto::KeyPair> keys;
    PathSpec path = make_path(1);
    auto pks = keys_for(path, keys);
    auto bulb = bundle({Clove{"exit", 0, 0, to_bytes("pad")}});
    OnionPacket pkt = build_onion(bulb, path, pks, kDefaultCellSize);

    Bytes wire = pkt.serialize(kDefaultCellSize);
    CHECK(OnionPacket::deserialize(wire).box_bytes == pkt.box_bytes);

    Bytes corrupt = wire;
    corrupt.back() = 0x01;  // nonzero fill
    CHECK_THROWS(OnionPacket::deserialize(corrupt));
}
