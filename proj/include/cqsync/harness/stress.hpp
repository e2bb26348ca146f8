#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Randomized runs on real threads with invariant checks during and after the
// run.
namespace cqs::check {

// primitive: mutex | semaphore | barrier | latch | pool-queue | pool-stack
struct StressOptions {
    std::string primitive = "mutex";
    std::string resume_mode = "async";
    std::string cancellation_mode = "smart";
    std::int64_t param = 4;  // semaphore permits
    int threads = 16;
    std::uint64_t ops_per_thread = 100'000;
    double cancel_rate = 0.1;
    std::uint64_t seed = 1;
    std::uint32_t segment_size = 16;
};

struct StressReport {
    bool passed = true;
    std::uint64_t ops = 0;
    std::uint64_t cancelled = 0;
    double seconds = 0;
    std::vector<std::string> violations;  // the first few only
    std::uint64_t violation_count = 0;
};

StressReport run_stress(const StressOptions& o);

std::string describe(const StressOptions& o);

}  // namespace cqs::check
