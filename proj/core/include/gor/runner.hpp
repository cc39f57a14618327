#ifndef GOR_RUNNER_HPP
#define GOR_RUNNER_HPP

#include <filesystem>

#include "gor/adversary.hpp"
#include "gor/config.hpp"

namespace gor::runner {

enum class Mode { pipeline, ab_experiment, validate, report };

struct RunSpec {
    std::filesystem::path scenario;
    std::filesystem::path policy;  // optional; scenario may reference one
    std::vector<uint64_t> seeds;
    std::filesystem::path out;
    Mode mode = Mode::pipeline;
};

// Exit codes: 0 ok, 1 run/validation failure, 2 missing input file.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitMissingFile = 2;

// Executes the run spec and writes artifacts under <out>/<seed>/. Diagnostics
// go to err, one line per failure.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

// Aggregates metrics.ndjson files under the directory into a summary table.
int report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

}  // namespace gor::runner

#endif
