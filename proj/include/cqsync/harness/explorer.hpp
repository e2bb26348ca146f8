#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Deterministic exploration of thread interleavings. Simulated threads run as
// fibers on the calling OS thread; every shimmed atomic operation is a point
// where the scheduler may switch to another fiber.
namespace cqs::check {

struct TraceStep {
    int thread;
    std::string what;
};
using Trace = std::vector<TraceStep>;

std::string format_trace(const Trace& trace);

// One run of a scenario: fresh state, one body per simulated thread, and a
// final check that runs after every body has returned.
struct Program {
    std::vector<std::function<void()>> threads;
    std::function<void()> finish;
};
using ProgramFactory = std::function<Program()>;

struct ExploreOptions {
    int preemption_bound = 2;  // negative: unbounded
    bool iterative = true;     // raise the bound one step at a time
    std::uint64_t max_runs = 2'000'000;
    std::uint64_t max_steps = 50'000;
    std::size_t stack_size = 256 * 1024;
};

struct Verdict {
    bool passed = true;
    bool complete = true;  // false when max_runs cut the search short
    std::uint64_t runs = 0;
    std::uint64_t max_depth = 0;
    int bound = 0;  // preemption bound at which the search ended
    std::string failure;
    Trace counterexample;
    std::vector<int> schedule;  // thread chosen at each decision, for replay
};

Verdict explore(const ProgramFactory& factory, const ExploreOptions& options);

// Random scheduling; run i uses seed + i, so any run can be replayed.
Verdict explore_random(const ProgramFactory& factory, std::uint64_t runs, std::uint64_t seed,
                       const ExploreOptions& options = {});

// Runs the given schedule once, then continues with default choices.
Verdict replay(const ProgramFactory& factory, const std::vector<int>& schedule,
               const ExploreOptions& options = {});

// Called from inside a simulated thread (or the finish callback): records a
// violation for the current run. The run keeps going.
void fail(const std::string& message);
void require(bool condition, const char* message);

// Appends a label to the trace without creating a schedule point.
void note(const std::string& label);

// Index of the running simulated thread, or -1 outside a run.
int current_thread();

bool exploring();

}  // namespace cqs::check
