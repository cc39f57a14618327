#include "gor/topology.hpp"

#include <algorithm>

namespace gor::topology {

void Topology::add_node(Node node) {
    if (nodes_.count(node.id)) throw std::invalid_argument("duplicate node " + node.id);
    nodes_.emplace(node.id, std::move(node));
}

void Topology::add_link(const NodeId& from, const NodeId& to, uint64_t latency) {
    if (!has_node(from) || !has_node(to))
        throw std::invalid_argument("link references unknown node");
    if (from == to) throw std::invalid_argument("self link");
    std::erase_if(links_, [&](const Link& l) { return l.from == from && l.to == to; });
    links_.insert(Link{from, to, latency});
}

void Topology::fully_connect_relays(uint64_t latency) {
    // Fills in missing edges only; explicitly declared links keep their latency.
    auto add_missing = [&](const NodeId& from, const NodeId& to) {
        if (!has_link(from, to)) links_.insert(Link{from, to, latency});
    };
    auto relays = relay_ids();
    for (const auto& a : relays)
        for (const auto& b : relays)
            if (a != b) add_missing(a, b);
    for (const auto& r : relays) {
        add_missing(entry_node(), r);
        add_missing(r, exit_node());
    }
}

const Node& Topology::node(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw std::invalid_argument("unknown node " + id);
    return it->second;
}

bool Topology::has_link(const NodeId& from, const NodeId& to) const {
    for (const auto& l : links_)
        if (l.from == from && l.to == to) return true;
    return false;
}

uint64_t Topology::latency(const NodeId& from, const NodeId& to) const {
    for (const auto& l : links_)
        if (l.from == from && l.to == to) return l.latency;
    throw std::invalid_argument("no link " + from + " -> " + to);
}

std::vector<NodeId> Topology::neighbors(const NodeId& from) const {
    std::vector<NodeId> out;
    for (const auto& l : links_)
        if (l.from == from) out.push_back(l.to);
    return out;
}

NodeId Topology::entry_node() const {
    for (const auto& [id, n] : nodes_)
        if (n.role == Role::entry) return id;
    throw std::runtime_error("topology has no entry node");
}

NodeId Topology::exit_node() const {
    for (const auto& [id, n] : nodes_)
        if (n.role == Role::exit) return id;
    throw std::runtime_error("topology has no exit node");
}

std::vector<NodeId> Topology::relay_ids() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_)
        if (n.role == Role::relay) out.push_back(id);
    return out;
}

std::vector<PathSpec> Topology::enumerate_paths(
    const NodeId& from, const NodeId& to, size_t min_relays, size_t max_relays,
    const std::function<bool(const NodeId&)>& relay_ok, size_t cap) const {
    std::vector<PathSpec> out;
    std::vector<NodeId> relays;
    std::set<NodeId> visited{from};

    std::function<void(const NodeId&)> dfs = [&](const NodeId& at) {
        if (out.size() >= cap) return;
        for (const auto& next : neighbors(at)) {
            if (out.size() >= cap) return;
            if (next == to) {
                if (relays.size() >= min_relays) {
                    PathSpec p;
                    p.entry = from;
                    p.relays = relays;
                    p.exit = to;
                    out.push_back(std::move(p));
                }
                continue;
            }
            if (visited.count(next) || relays.size() >= max_relays) continue;
            if (node(next).role != Role::relay || (relay_ok && !relay_ok(next)))
                continue;
            visited.insert(next);
            relays.push_back(next);
            dfs(next);
            relays.pop_back();
            visited.erase(next);
        }
    };
    dfs(from);
    return out;
}

namespace {

bool pick_disjoint(const std::vector<PathSpec>& paths, size_t start, size_t need,
                   std::set<NodeId>& used, std::vector<PathSpec>& chosen) {
    if (need == 0) return true;
    for (size_t i = start; i < paths.size(); ++i) {
        bool clash = false;
        for (const auto& r : paths[i].relays)
            if (used.count(r)) {
                clash = true;
                break;
            }
        if (clash) continue;
        for (const auto& r : paths[i].relays) used.insert(r);
        chosen.push_back(paths[i]);
        if (pick_disjoint(paths, i + 1, need - 1, used, chosen)) return true;
        chosen.pop_back();
        for (const auto& r : paths[i].relays) used.erase(r);
    }
    return false;
}

}  // namespace

std::vector<PathSpec> Topology::disjoint_paths(
    const NodeId& from, const NodeId& to, size_t n, size_t min_relays,
    const std::function<bool(const NodeId&)>& relay_ok, std::mt19937_64& rng) const {
    // Iterative deepening on path length: at small lengths the enumeration is
    // complete, so the candidate set is diverse even in dense meshes where a
    // capped full-depth enumeration would exhaust its budget inside one DFS
    // branch and return paths that all share the first relay.
    for (size_t max_relays = min_relays; max_relays <= packet::kMaxPathLength;
         ++max_relays) {
        auto paths = enumerate_paths(from, to, min_relays, max_relays, relay_ok);
        std::shuffle(paths.begin(), paths.end(), rng);
        // Shorter paths first so the backtracking search leaves relays free
        // for the remaining picks; the shuffle above breaks ties.
        std::stable_sort(paths.begin(), paths.end(),
                         [](const PathSpec& a, const PathSpec& b) {
                             return a.relays.size() < b.relays.size();
                         });
        std::set<NodeId> used;
        std::vector<PathSpec> chosen;
        if (pick_disjoint(paths, 0, n, used, chosen)) return chosen;
    }
    return {};
}

size_t Topology::max_disjoint_paths(
    size_t min_relays, const std::function<bool(const NodeId&)>& relay_ok) const {
    std::mt19937_64 rng(0);
    size_t lo = 0;
    for (size_t n = 1; n <= nodes_.size(); ++n) {
        if (disjoint_paths(entry_node(), exit_node(), n, min_relays, relay_ok, rng)
                .empty())
            break;
        lo = n;
    }
    return lo;
}

uint64_t Topology::max_path_latency() const {
    // Upper bound: longest simple path is at most every link once.
    uint64_t total = 0;
    for (const auto& l : links_) total = std::max(total, l.latency);
    return total * (packet::kMaxPathLength + 2);
}

}  // namespace gor::topology
