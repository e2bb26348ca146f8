#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqsync/harness/explorer.hpp"

namespace cqs::check {

// A small concurrent program over one primitive. Each simulated thread runs a
// list of named operations; every applicable invariant of the primitive is
// checked during the run and at its end.
//
// primitive: mutex | semaphore | barrier | latch | pool-queue | pool-stack |
//            future | naive-smart-mutex | async-trylock-mutex
struct ScenarioConfig {
    std::string name;
    std::string primitive = "mutex";
    std::string resume_mode = "async";
    std::string cancellation_mode = "smart";
    std::int64_t param = 1;  // permits, parties, latch count or initial pool elements
    std::uint32_t segment_size = 2;
    std::uint32_t max_spin_cycles = 2;
    std::vector<std::vector<std::string>> threads;
    int preemption_bound = 2;
    bool expect_violation = false;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& json_text);
std::string to_json(const ScenarioConfig& s);

// Throws std::invalid_argument for unknown primitives or operations.
ProgramFactory make_program(const ScenarioConfig& s);

std::string describe(const ScenarioConfig& s);

// A family of primitive configurations checked together.
struct Family {
    std::string label;
    ScenarioConfig base;  // everything except threads
};

// Primitive configurations covered by the exhaustive suite.
std::vector<Family> standard_families();

// All two-thread scenarios built from the primitive's operation blocks with at
// most max_ops operations in total and exactly one cancellation.
std::vector<ScenarioConfig> enumerate_scenarios(const Family& family, int max_ops);

// Hand-written scenarios that reproduce the two known races on the naive
// fixtures, paired with the same programs on the real primitives.
std::vector<ScenarioConfig> race_scenarios();

}  // namespace cqs::check
