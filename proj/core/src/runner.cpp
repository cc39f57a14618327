#include "gor/runner.hpp"

#include <fstream>
#include <iomanip>

#include "json.hpp"

namespace gor::runner {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

adversary::VantageSet entry_exit_vantage(const topology::Topology& topo) {
    return {topo.entry_node(), topo.exit_node()};
}

ordered_json metrics_json(uint64_t seed, const std::string& arm,
                          const sim::Metrics& m) {
    ordered_json j;
    j["seed"] = seed;
    j["arm"] = arm;
    j["submitted"] = m.submitted;
    j["delivered"] = m.delivered;
    j["broadcasts"] = m.broadcasts;
    j["drops"] = m.drops;
    j["replays_suppressed"] = m.replays_suppressed;
    j["lost"] = m.lost;
    j["acks_sent"] = m.acks_sent;
    j["acks_received"] = m.acks_received;
    j["acks_suppressed"] = m.acks_suppressed;
    return j;
}

void write_artifacts(const fs::path& dir, const sim::ScenarioResult& result,
                     const std::string& metrics_ndjson) {
    fs::create_directories(dir);
    write_file(dir / "core.ledger", result.core.export_ndjson());
    write_file(dir / "side.ledger", result.side.export_ndjson());
    write_file(dir / "trace.ndjson", result.trace.export_ndjson());
    write_file(dir / "metrics.ndjson", metrics_ndjson);
}

int run_seed(const RunSpec& spec, const sim::Scenario& scenario,
             const pam::Policy& policy, uint64_t seed, std::ostream& err) {
    const fs::path dir = spec.out / std::to_string(seed);
    if (spec.mode == Mode::pipeline) {
        sim::ScenarioResult result = sim::run_scenario(scenario, policy, seed);
        auto vantage = entry_exit_vantage(scenario.topo);
        auto guess = adversary::timing_correlate(result.trace, vantage,
                                                 scenario.topo.max_path_latency());
        double linkability = adversary::score(guess, result.truth);
        pam::Policy next = pam::update_policy(
            policy, linkability,
            static_cast<uint32_t>(scenario.topo.max_disjoint_paths(
                1, [](const sim::NodeId&) { return true; })),
            static_cast<uint32_t>(scenario.topo.relay_ids().size()));

        ordered_json j = metrics_json(seed, "gor", result.metrics);
        j["linkability"] = linkability;
        j["score"] = linkability;
        j["next_n_paths"] = next.n_paths;
        j["next_min_relays_per_path"] = next.min_relays_per_path;
        write_artifacts(dir, result, j.dump() + "\n");
        return kExitOk;
    }
    if (spec.mode == Mode::ab_experiment) {
        auto vantage = entry_exit_vantage(scenario.topo);
        adversary::AbResult ab =
            adversary::ab_comparison(scenario, policy, vantage, seed);
        sim::ScenarioResult result = sim::run_scenario(scenario, policy, seed);

        ordered_json gor = metrics_json(seed, "gor", result.metrics);
        gor["score"] = ab.gor_score;
        sim::ScenarioResult direct = sim::run_direct(scenario, seed);
        ordered_json ctl = metrics_json(seed, "direct", direct.metrics);
        ctl["score"] = ab.direct_score;
        write_artifacts(dir, result, gor.dump() + "\n" + ctl.dump() + "\n");
        return kExitOk;
    }
    err << "unsupported mode for run()\n";
    return kExitFailure;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    if (spec.mode == Mode::report) return report(spec.out, out, err);

    if (spec.mode == Mode::validate) {
        // Re-checks previously exported ledgers; no scenario needed.
        std::vector<fs::path> dirs;
        if (!spec.seeds.empty()) {
            for (uint64_t seed : spec.seeds) dirs.push_back(spec.out / std::to_string(seed));
        } else if (fs::exists(spec.out)) {
            for (const auto& entry : fs::directory_iterator(spec.out))
                if (entry.is_directory()) dirs.push_back(entry.path());
            std::sort(dirs.begin(), dirs.end());
        }
        if (dirs.empty()) {
            err << "no runs found under " << spec.out.string() << "\n";
            return kExitFailure;
        }
        for (const auto& dir : dirs) {
            for (const char* name : {"core.ledger", "side.ledger"}) {
                const fs::path path = dir / name;
                if (!fs::exists(path)) {
                    err << "missing ledger: " << path.string() << "\n";
                    return kExitMissingFile;
                }
                const std::string chain_id =
                    name == std::string("core.ledger") ? "core" : "side";
                try {
                    auto ledger =
                        chain::Ledger::import_ndjson(chain_id, config::read_file(path));
                    if (auto violation = ledger.validate_chain()) {
                        err << "invariant violation: " << path.string() << ": "
                            << *violation << "\n";
                        return kExitFailure;
                    }
                } catch (const std::exception& e) {
                    err << "invalid ledger " << path.string() << ": " << e.what()
                        << "\n";
                    return kExitFailure;
                }
            }
            out << dir.string() << ": ok\n";
        }
        return kExitOk;
    }

    if (!fs::exists(spec.scenario)) {
        err << "scenario file not found: " << spec.scenario.string() << "\n";
        return kExitMissingFile;
    }

    sim::Scenario scenario;
    pam::Policy policy;
    try {
        scenario = config::load_scenario(spec.scenario);
        fs::path policy_path = spec.policy;
        if (policy_path.empty() && !scenario.policy_ref.empty())
            policy_path = spec.scenario.parent_path() / scenario.policy_ref;
        if (policy_path.empty()) {
            err << "no policy given: pass --policy or add a 'policy' line to the "
                   "scenario\n";
            return kExitFailure;
        }
        if (!fs::exists(policy_path)) {
            err << "policy file not found: " << policy_path.string() << "\n";
            return kExitMissingFile;
        }
        policy = config::load_policy(policy_path);
    } catch (const config::ParseError& e) {
        err << "config parse error: " << e.what() << "\n";
        return kExitFailure;
    }

    std::vector<uint64_t> seeds = spec.seeds;
    if (seeds.empty()) seeds.push_back(scenario.default_seed);

    for (uint64_t seed : seeds) {
        try {
            int rc = run_seed(spec, scenario, policy, seed, err);
            if (rc != kExitOk) return rc;
            out << "seed " << seed << ": ok\n";
        } catch (const std::exception& e) {
            err << "seed " << seed << ": " << e.what() << "\n";
            return kExitFailure;
        }
    }
    return kExitOk;
}

int report(const fs::path& dir, std::ostream& out, std::ostream& err) {
    struct ArmStats {
        size_t runs = 0;
        double score_sum = 0;
        size_t scored = 0;
        uint64_t delivered = 0;
        uint64_t drops = 0;
    };
    std::map<std::string, ArmStats> arms;

    if (fs::exists(dir)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().filename() == "metrics.ndjson")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::istringstream in(config::read_file(file));
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                ordered_json j = ordered_json::parse(line);
                ArmStats& s = arms[j.value("arm", "gor")];
                s.runs++;
                s.delivered += j.value("delivered", 0ull);
                s.drops += j.value("drops", 0ull);
                if (j.contains("score")) {
                    s.score_sum += j["score"].get<double>();
                    s.scored++;
                }
            }
        }
    }

    if (arms.empty()) {
        err << "no runs found under " << dir.string() << "\n";
        return kExitFailure;
    }

    out << std::left << std::setw(10) << "arm" << std::right << std::setw(8)
        << "runs" << std::setw(12) << "mean_score" << std::setw(12) << "delivered"
        << std::setw(8) << "drops" << "\n";
    for (const auto& [arm, s] : arms) {
        out << std::left << std::setw(10) << arm << std::right << std::setw(8)
            << s.runs << std::setw(12) << std::fixed << std::setprecision(4)
            << (s.scored ? s.score_sum / s.scored : 0.0) << std::setw(12)
            << s.delivered << std::setw(8) << s.drops << "\n";
    }
    return kExitOk;
}

}  // namespace gor::runner
