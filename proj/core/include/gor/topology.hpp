#ifndef GOR_TOPOLOGY_HPP
#define GOR_TOPOLOGY_HPP

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gor/chain.hpp"
#include "gor/packet.hpp"

namespace gor::topology {

using packet::NodeId;
using packet::PathSpec;

enum class Role { entry, relay, exit };

struct Node {
    NodeId id;
    Role role = Role::relay;
    crypto::KeyPair keypair;
    Digest contract_id{};  // relay nodes only
};

struct Link {
    NodeId from;
    NodeId to;
    uint64_t latency = 1;  // ticks

    auto operator<=>(const Link&) const = default;
};

class Topology {
public:
    void add_node(Node node);
    void add_link(const NodeId& from, const NodeId& to, uint64_t latency);
    // Adds both directions between every pair of relays, plus entry->relay
    // and relay->exit edges.
    void fully_connect_relays(uint64_t latency);

    bool has_node(const NodeId& id) const { return nodes_.count(id) > 0; }
    const Node& node(const NodeId& id) const;
    const std::map<NodeId, Node>& nodes() const { return nodes_; }
    const std::set<Link>& links() const { return links_; }

    bool has_link(const NodeId& from, const NodeId& to) const;
    uint64_t latency(const NodeId& from, const NodeId& to) const;
    std::vector<NodeId> neighbors(const NodeId& from) const;

    NodeId entry_node() const;
    NodeId exit_node() const;
    std::vector<NodeId> relay_ids() const;

    // All simple entry->exit paths whose relay interior passes the filter,
    // with min_relays..max_relays relays, capped to keep enumeration sane.
    std::vector<PathSpec> enumerate_paths(
        const NodeId& from, const NodeId& to, size_t min_relays, size_t max_relays,
        const std::function<bool(const NodeId&)>& relay_ok, size_t cap = 20000) const;

    // Picks n pairwise relay-disjoint paths via seeded shuffle plus
    // backtracking; empty result when the topology cannot satisfy n.
    std::vector<PathSpec> disjoint_paths(
        const NodeId& from, const NodeId& to, size_t n, size_t min_relays,
        const std::function<bool(const NodeId&)>& relay_ok, std::mt19937_64& rng) const;

    // Largest number of pairwise relay-disjoint admissible paths.
    size_t max_disjoint_paths(size_t min_relays,
                              const std::function<bool(const NodeId&)>& relay_ok) const;

    uint64_t max_path_latency() const;

private:
    std::map<NodeId, Node> nodes_;
    std::set<Link> links_;
};

}  // namespace gor::topology

#endif
