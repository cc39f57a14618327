#include <iostream>

#include "CLI11.hpp"
#include "gor/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gorsim: privacy sidechain simulator and adversary harness"};
    app.allow_extras(false);

    std::string scenario;
    std::string policy;
    std::vector<uint64_t> seeds;
    std::string out_dir = "out";
    std::string mode = "pipeline";

    app.add_option("--scenario", scenario, "scenario config file");
    app.add_option("--policy", policy,
                   "policy file (overrides the scenario's policy line)");
    app.add_option("--seed", seeds, "run seed, repeatable");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--mode", mode, "pipeline | ab_experiment | validate | report")
        ->check(CLI::IsMember({"pipeline", "ab_experiment", "validate", "report"}));

    CLI11_PARSE(app, argc, argv);

    gor::runner::RunSpec spec;
    spec.scenario = scenario;
    spec.policy = policy;
    spec.seeds = seeds;
    spec.out = out_dir;
    if (mode == "pipeline") spec.mode = gor::runner::Mode::pipeline;
    else if (mode == "ab_experiment") spec.mode = gor::runner::Mode::ab_experiment;
    else if (mode == "validate") spec.mode = gor::runner::Mode::validate;
    else spec.mode = gor::runner::Mode::report;

    if (spec.mode != gor::runner::Mode::report && spec.mode != gor::runner::Mode::validate &&
        scenario.empty()) {
        std::cerr << "missing required --scenario\n";
        return gor::runner::kExitMissingFile;
    }

    try {
        return gor::runner::run(spec, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gor::runner::kExitFailure;
    }
}
