#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

// Throughput workloads on real threads, reported as CSV rows.
namespace cqs::bench {

// primitive: mutex | semaphore | barrier | latch | pool-queue | pool-stack | clh | mcs
struct BenchConfig {
    std::string primitive = "semaphore";
    std::vector<int> threads = {1, 2, 4, 8};
    std::int64_t param = 4;   // permits or pool elements; barrier parties always equal threads
    double work_in = 100;     // mean spin iterations before each operation
    double work_out = 100;    // mean spin iterations after it (inside the critical section for locks)
    std::uint64_t ops = 100'000;  // operations per measured iteration, across all threads
    std::uint64_t seed = 1;
    int iterations = 10;
    double warmup_fraction = 0.2;  // leading iterations dropped before averaging
};

struct BenchRow {
    std::string primitive;
    int threads = 0;
    std::int64_t param = 0;
    double mean_ns = 0;
    double std_ns = 0;
    std::uint64_t ops = 0;
};

// Spin loop whose iteration counts follow a geometric distribution with the
// given mean.
class GeometricWork {
public:
    GeometricWork(double mean, std::uint64_t seed);
    void run();
    std::uint64_t sink() const noexcept { return sink_; }

private:
    bool enabled_;
    std::mt19937_64 rng_;
    std::geometric_distribution<std::uint64_t> dist_;
    std::uint64_t sink_ = 0;
};

// Per-thread time per operation for one iteration, in nanoseconds. For the
// barrier an operation is one synchronization phase.
double measure_iteration(const BenchConfig& c, int threads, std::uint64_t iteration_seed);

BenchRow run_point(const BenchConfig& c, int threads);
std::vector<BenchRow> run_bench(const BenchConfig& c);

// Drops the leading fraction of samples, rounding down.
std::vector<double> drop_warmup(const std::vector<double>& samples, double fraction);
double mean(const std::vector<double>& xs);
double stddev(const std::vector<double>& xs);

const char* csv_header();
std::string csv_row(const BenchRow& r);
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);

const std::vector<std::string>& primitives();

}  // namespace cqs::bench
