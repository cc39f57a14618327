#include "gor/config.hpp"

#include <fstream>
#include <sstream>

namespace gor::config {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

std::set<std::string> split_list(const std::string& value) {
    std::set<std::string> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.insert(item);
    }
    return out;
}

bool parse_bool(const std::string& v, size_t line_no) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    fail(line_no, "expected boolean, got '" + v + "'");
}

uint64_t parse_u64(const std::string& v, size_t line_no) {
    try {
        size_t pos = 0;
        uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        fail(line_no, "expected integer, got '" + v + "'");
    }
}

double parse_fraction(const std::string& v, size_t line_no) {
    try {
        size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        fail(line_no, "expected number, got '" + v + "'");
    }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

pam::Policy parse_policy(const std::string& text) {
    pam::Policy policy;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "n_paths")
            policy.n_paths = static_cast<uint32_t>(parse_u64(value, line_no));
        else if (key == "min_relays_per_path")
            policy.min_relays_per_path =
                static_cast<uint32_t>(parse_u64(value, line_no));
        else if (key == "cell_size")
            policy.cell_size = parse_u64(value, line_no);
        else if (key == "recorded_fields")
            policy.recorded_fields = split_list(value);
        else if (key == "pseudonymize")
            policy.pseudonymize = parse_bool(value, line_no);
        else if (key == "untrusted_action") {
            if (value == "quarantine")
                policy.untrusted_action = pam::UntrustedAction::quarantine;
            else if (value == "strip_fields")
                policy.untrusted_action = pam::UntrustedAction::strip_fields;
            else
                fail(line_no, "untrusted_action must be quarantine or strip_fields");
        } else if (key == "linkability_threshold")
            policy.linkability_threshold = parse_fraction(value, line_no);
        else
            fail(line_no, "unknown policy key '" + key + "'");
    }
    try {
        policy.validate();
    } catch (const std::exception& e) {
        throw ParseError(std::string("policy invalid: ") + e.what());
    }
    return policy;
}

pam::Policy load_policy(const std::filesystem::path& path) {
    return parse_policy(read_file(path));
}

sim::Scenario parse_scenario(const std::string& text) {
    sim::Scenario sc;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    std::optional<uint64_t> full_mesh_latency;

    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream words(line);
        std::string verb;
        words >> verb;

        if (verb == "node") {
            std::string id, role;
            if (!(words >> id >> role)) fail(line_no, "usage: node <id> <role>");
            topology::Node node;
            node.id = id;
            if (role == "entry")
                node.role = topology::Role::entry;
            else if (role == "relay")
                node.role = topology::Role::relay;
            else if (role == "exit")
                node.role = topology::Role::exit;
            else
                fail(line_no, "role must be entry, relay or exit");
            Digest kd = crypto::hash_str("node:" + id);
            node.keypair = crypto::keygen(Bytes(kd.begin(), kd.end()));
            node.contract_id = crypto::hash_str("contract:" + id);
            try {
                sc.topo.add_node(std::move(node));
            } catch (const std::exception& e) {
                fail(line_no, e.what());
            }
        } else if (verb == "link") {
            std::string from, to, lat;
            if (!(words >> from >> to >> lat))
                fail(line_no, "usage: link <from> <to> <latency>");
            try {
                sc.topo.add_link(from, to, parse_u64(lat, line_no));
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception& e) {
                fail(line_no, e.what());
            }
        } else if (verb == "full_mesh") {
            std::string lat;
            if (!(words >> lat)) fail(line_no, "usage: full_mesh <latency>");
            full_mesh_latency = parse_u64(lat, line_no);
        } else if (verb == "balance") {
            std::string name, amount;
            if (!(words >> name >> amount))
                fail(line_no, "usage: balance <actor> <amount>");
            sc.balances[name] = parse_u64(amount, line_no);
        } else if (verb == "tx") {
            sim::ScenarioTx tx;
            std::string amount, payload;
            if (!(words >> tx.sender >> tx.receiver >> amount >> tx.asset >> payload))
                fail(line_no,
                     "usage: tx <sender> <receiver> <amount> <asset> <payload-hex|-> "
                     "[at <tick>]");
            tx.amount = parse_u64(amount, line_no);
            if (payload != "-") {
                try {
                    tx.payload = hex_decode(payload);
                } catch (const std::exception& e) {
                    fail(line_no, e.what());
                }
            }
            std::string kw;
            if (words >> kw) {
                std::string tick;
                if (kw != "at" || !(words >> tick)) fail(line_no, "expected 'at <tick>'");
                tx.at = parse_u64(tick, line_no);
            }
            sc.txs.push_back(std::move(tx));
        } else if (verb == "acks") {
            std::string v;
            if (!(words >> v)) fail(line_no, "usage: acks on|off");
            sc.acks = parse_bool(v, line_no);
        } else if (verb == "policy") {
            if (!(words >> sc.policy_ref)) fail(line_no, "usage: policy <path>");
        } else if (verb == "seed") {
            std::string v;
            if (!(words >> v)) fail(line_no, "usage: seed <integer>");
            sc.default_seed = parse_u64(v, line_no);
        } else if (verb == "fault") {
            std::string which, v;
            if (!(words >> which >> v)) fail(line_no, "usage: fault <name> <value>");
            if (which == "kill_sidechain_at")
                sc.faults.kill_sidechain_at = parse_u64(v, line_no);
            else if (which == "packet_loss")
                sc.faults.packet_loss = parse_fraction(v, line_no);
            else
                fail(line_no, "unknown fault '" + which + "'");
        } else {
            fail(line_no, "unknown directive '" + verb + "'");
        }
    }

    if (full_mesh_latency) {
        try {
            sc.topo.fully_connect_relays(*full_mesh_latency);
        } catch (const std::exception& e) {
            throw ParseError(std::string("full_mesh: ") + e.what());
        }
    }
    try {
        sc.topo.entry_node();
        sc.topo.exit_node();
    } catch (const std::exception& e) {
        throw ParseError(e.what());
    }
    return sc;
}

sim::Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path));
}

}  // namespace gor::config
