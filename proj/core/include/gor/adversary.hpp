#ifndef GOR_ADVERSARY_HPP
#define GOR_ADVERSARY_HPP

#include "gor/sim.hpp"

namespace gor::adversary {

using sim::NodeId;

// Compromised nodes; an event is visible when either endpoint is in the set.
using VantageSet = std::set<NodeId>;

struct Guess {
    NodeId sender_client;
    chain::Address receiver{};
    double confidence = 0.0;
};

// Keyed by the flow's core-visible tx id.
struct LinkageGuess {
    std::map<Digest, Guess> guesses;
};

// Passive timing correlation: pairs visible client submissions with visible
// core broadcasts whose times differ by at most window, earliest first.
// Plaintext (control arm) submissions link directly. Deterministic.
LinkageGuess timing_correlate(const sim::TraceLog& trace, const VantageSet& vantage,
                              uint64_t window);

// Fraction of flows whose (sender, receiver) pair was guessed exactly.
double score(const LinkageGuess& guess, const std::map<Digest, sim::FlowTruth>& truth);

struct AbResult {
    double gor_score = 0.0;
    double direct_score = 0.0;
};

// Same workload, same seed, same vantage: once through the overlay,
// once broadcast in the clear.
AbResult ab_comparison(const sim::Scenario& scenario, const pam::Policy& policy,
                       const VantageSet& vantage, uint64_t seed);

}  // namespace gor::adversary

#endif
