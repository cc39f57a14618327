#include "gor/adversary.hpp"

namespace gor::adversary {

using chain::Transaction;

LinkageGuess timing_correlate(const sim::TraceLog& trace, const VantageSet& vantage,
                              uint64_t window) {
    auto visible = [&](const sim::Event& e) {
        return vantage.count(e.from) > 0 || vantage.count(e.to) > 0;
    };

    struct EntryObs {
        uint64_t time;
        NodeId client;
        bool matched = false;
    };
    std::vector<EntryObs> entries;
    LinkageGuess out;

    for (const auto& e : trace.events) {
        if (!visible(e)) continue;
        if (e.kind == "submit") {
            entries.push_back(EntryObs{e.time, e.from});
        } else if (e.kind == "plain") {
            // Direct broadcast carries sender and receiver in the clear.
            Transaction tx = Transaction::full_deserialize(e.data);
            out.guesses[tx.tx_id] = Guess{e.from, tx.receiver, 1.0};
        } else if (e.kind == "broadcast") {
            Transaction tx = Transaction::full_deserialize(e.data);
            // Earliest unmatched submission within the window.
            EntryObs* best = nullptr;
            for (auto& obs : entries) {
                if (obs.matched || obs.time > e.time || e.time - obs.time > window)
                    continue;
                if (!best || obs.time < best->time) best = &obs;
            }
            if (best) {
                best->matched = true;
                double confidence = 1.0;
                out.guesses[tx.tx_id] = Guess{best->client, tx.receiver, confidence};
            }
        }
    }
    return out;
}

double score(const LinkageGuess& guess,
             const std::map<Digest, sim::FlowTruth>& truth) {
    if (truth.empty()) return 0.0;
    size_t correct = 0;
    for (const auto& [_, t] : truth) {
        auto it = guess.guesses.find(t.final_tx_id);
        if (it == guess.guesses.end()) continue;
        if (it->second.sender_client == t.sender_client &&
            it->second.receiver == t.receiver)
            ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

AbResult ab_comparison(const sim::Scenario& scenario, const pam::Policy& policy,
                       const VantageSet& vantage, uint64_t seed) {
    const uint64_t window = scenario.topo.max_path_latency();

    sim::ScenarioResult gor = sim::run_scenario(scenario, policy, seed);
    LinkageGuess gor_guess = timing_correlate(gor.trace, vantage, window);

    sim::ScenarioResult direct = sim::run_direct(scenario, seed);
    VantageSet direct_vantage = vantage;
    direct_vantage.insert("core");  // the mempool is public either way
    LinkageGuess direct_guess = timing_correlate(direct.trace, direct_vantage, window);

    return AbResult{score(gor_guess, gor.truth), score(direct_guess, direct.truth)};
}

}  // namespace gor::adversary
