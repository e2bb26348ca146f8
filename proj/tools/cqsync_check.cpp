#include <iostream>

#include <CLI11.hpp>

#include "cqsync/harness/explorer.hpp"
#include "cqsync/harness/scenario.hpp"

int main(int argc, char** argv) {
    std::string path;
    std::uint64_t random_runs = 0;
    std::uint64_t seed = 1;
    int bound = -2;
    bool exhaustive = false;

    CLI::App app{"Explore the interleavings of a small cqsync scenario"};
    app.add_option("--scenario", path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    auto* ex = app.add_flag("--exhaustive", exhaustive, "Enumerate schedules up to the preemption bound (default)");
    app.add_option("--random", random_runs, "Run N randomly scheduled executions instead")->excludes(ex);
    app.add_option("--seed", seed, "First seed for --random")->capture_default_str();
    app.add_option("--bound", bound, "Preemption bound; negative for none (default: from the scenario)");
    CLI11_PARSE(app, argc, argv);

    cqs::check::ScenarioConfig s;
    cqs::check::ProgramFactory factory;
    try {
        s = cqs::check::load_scenario(path);
        factory = cqs::check::make_program(s);
    } catch (const std::exception& e) {
        std::cerr << "cqsync-check: " << e.what() << "\n";
        return 2;
    }

    cqs::check::ExploreOptions opt;
    opt.preemption_bound = bound == -2 ? s.preemption_bound : bound;
    cqs::check::Verdict v = random_runs > 0 ? cqs::check::explore_random(factory, random_runs, seed, opt)
                                            : cqs::check::explore(factory, opt);

    std::cout << "scenario: " << cqs::check::describe(s) << "\n";
    std::cout << "runs: " << v.runs << "  preemption bound: " << v.bound << "  longest run: " << v.max_depth
              << " steps\n";
    if (v.passed) {
        std::cout << (v.complete ? "verdict: pass\n" : "verdict: pass (search cut short by the run limit)\n");
    } else {
        std::cout << "verdict: counterexample\n  " << v.failure << "\n" << cqs::check::format_trace(v.counterexample);
        std::cout << "schedule:";
        for (int t : v.schedule) std::cout << ' ' << t;
        std::cout << "\n";
    }
    if (s.expect_violation) std::cout << "(this scenario is expected to fail)\n";
    return v.passed ? 0 : 1;
}
