#ifndef GOR_CONFIG_HPP
#define GOR_CONFIG_HPP

#include <filesystem>

#include "gor/sim.hpp"

namespace gor::config {

// Thrown with "line N: ..." messages for malformed config input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Plain-text key = value policy file; unknown keys are line-numbered errors.
pam::Policy parse_policy(const std::string& text);
pam::Policy load_policy(const std::filesystem::path& path);

// Plain-text scenario file: nodes, links, balances, transactions, fault
// switches, policy reference and default seed.
sim::Scenario parse_scenario(const std::string& text);
sim::Scenario load_scenario(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace gor::config

#endif
