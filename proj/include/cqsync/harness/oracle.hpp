#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Reference models for single-threaded use of each primitive, and exhaustive
// comparison of the real primitives against them.
namespace cqs::check {

enum class SeqOp : std::uint8_t {
    acquire,
    release,
    try_acquire,
    arrive,
    count_down,
    await,
    put,
    take,
    suspend,
    resume,
    cancel_oldest,  // cancels the oldest pending future
    cancel_newest,  // cancels the newest pending future
};

const char* to_string(SeqOp op);

// primitive: mutex | semaphore | barrier | latch | pool-queue | pool-stack | cqs
struct OracleConfig {
    std::string primitive = "mutex";
    std::string resume_mode = "async";
    std::string cancellation_mode = "smart";
    std::int64_t param = 1;  // permits, parties or latch count
    std::uint32_t segment_size = 2;
};

std::string describe(const OracleConfig& c);

// Status of a future: completed with a value (>= 0) or one of these.
inline constexpr std::int64_t kPending = -1;
inline constexpr std::int64_t kCancelled = -2;
inline constexpr std::int64_t kNoFuture = -3;  // suspend failed on a broken cell

struct TraceCheck {
    bool matched = true;
    std::string mismatch;  // empty when matched
};

// Runs one trace on both the reference model and the primitive, comparing the
// result of every operation and the status of every future after each step.
// Operations that the model does not enable at their position are rejected.
TraceCheck check_trace(const OracleConfig& c, const std::vector<SeqOp>& trace);

struct OracleReport {
    bool passed = true;
    std::uint64_t traces = 0;  // maximal traces replayed
    std::uint64_t steps = 0;
    std::string mismatch;
    std::vector<SeqOp> failing_trace;
};

// Replays every maximal trace of at most max_len enabled operations. Each
// shorter trace is a prefix of one of them and is compared along the way.
OracleReport check_all_traces(const OracleConfig& c, int max_len);

std::vector<OracleConfig> standard_oracle_configs();

}  // namespace cqs::check
