#include "cqsync/bench/workloads.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cqsync/bench/locks.hpp"
#include "cqsync/cqsync.hpp"

namespace cqs::bench {

GeometricWork::GeometricWork(double mean, std::uint64_t seed)
    : enabled_(mean > 0), rng_(seed), dist_(1.0 / (std::max(mean, 0.0) + 1.0)) {}

void GeometricWork::run() {
    if (!enabled_) return;
    std::uint64_t n = dist_(rng_);
    std::uint64_t x = sink_;
    for (std::uint64_t i = 0; i < n; ++i) {
        x = x * 6364136223846793005ull + 1442695040888963407ull;
        asm volatile("" : "+r"(x));
    }
    sink_ = x;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Worker {
    GeometricWork in;
    GeometricWork out;
};

Worker make_worker(const BenchConfig& c, std::uint64_t seed, int t) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
    std::uint64_t s[2];
    seq.generate(s, s + 2);
    return {GeometricWork(c.work_in, s[0]), GeometricWork(c.work_out, s[1])};
}

// Starts all threads together and returns the wall time until the last ends.
double timed_run(int threads, const std::function<void(int)>& body) {
    std::barrier start(threads + 1);
    std::vector<std::thread> ts;
    ts.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        ts.emplace_back([&, t] {
            start.arrive_and_wait();
            body(t);
        });
    }
    start.arrive_and_wait();
    auto t0 = Clock::now();
    for (auto& th : ts) th.join();
    return std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
}

std::uint64_t share(std::uint64_t total, int threads, int t) {
    std::uint64_t n = total / static_cast<std::uint64_t>(threads);
    if (t == 0) n += total % static_cast<std::uint64_t>(threads);
    return n;
}

template <class Lock, class Enter, class Exit>
double lock_workload(const BenchConfig& c, int threads, std::uint64_t seed, Enter enter, Exit exit) {
    Lock lock;
    double ns = timed_run(threads, [&](int t) {
        Worker w = make_worker(c, seed, t);
        typename Lock::Local local;
        for (std::uint64_t i = share(c.ops, threads, t); i > 0; --i) {
            w.in.run();
            enter(lock, local);
            w.out.run();
            exit(lock, local);
        }
    });
    return ns * threads / static_cast<double>(c.ops);
}

struct ClhBox {
    using Local = baseline::ClhLock::Handle;
    baseline::ClhLock l;
};
struct McsBox {
    using Local = baseline::McsLock::Node;
    baseline::McsLock l;
};

double semaphore_workload(const BenchConfig& c, int threads, std::uint64_t seed, std::int64_t permits) {
    Semaphore sem(permits);
    double ns = timed_run(threads, [&](int t) {
        Worker w = make_worker(c, seed, t);
        for (std::uint64_t i = share(c.ops, threads, t); i > 0; --i) {
            w.in.run();
            sem.acquire().blocking_get();
            w.out.run();
            sem.release();
        }
    });
    return ns * threads / static_cast<double>(c.ops);
}

double barrier_workload(const BenchConfig& c, int threads, std::uint64_t seed) {
    const std::uint64_t phases = std::max<std::uint64_t>(1, c.ops / static_cast<std::uint64_t>(threads));
    std::vector<std::unique_ptr<Barrier>> bs;
    bs.reserve(phases);
    for (std::uint64_t p = 0; p < phases; ++p) bs.push_back(std::make_unique<Barrier>(threads));
    double ns = timed_run(threads, [&](int t) {
        Worker w = make_worker(c, seed, t);
        for (std::uint64_t p = 0; p < phases; ++p) {
            bs[p]->arrive().blocking_get();
            w.out.run();
        }
    });
    return ns / static_cast<double>(phases);
}

double latch_workload(const BenchConfig& c, int threads, std::uint64_t seed) {
    CountDownLatch latch(static_cast<std::int64_t>(c.ops));
    double ns = timed_run(threads, [&](int t) {
        Worker w = make_worker(c, seed, t);
        for (std::uint64_t i = share(c.ops, threads, t); i > 0; --i) {
            latch.count_down();
            w.out.run();
        }
        latch.await().blocking_get();
    });
    return ns * threads / static_cast<double>(c.ops);
}

template <class Pool>
double pool_workload(const BenchConfig& c, int threads, std::uint64_t seed) {
    Pool pool;
    for (std::int64_t e = 0; e < std::max<std::int64_t>(1, c.param); ++e) pool.put(e);
    double ns = timed_run(threads, [&](int t) {
        Worker w = make_worker(c, seed, t);
        for (std::uint64_t i = share(c.ops, threads, t); i > 0; --i) {
            w.in.run();
            std::int64_t e = pool.take().blocking_get().value();
            w.out.run();
            pool.put(e);
        }
    });
    return ns * threads / static_cast<double>(c.ops);
}

}  // namespace

double measure_iteration(const BenchConfig& c, int threads, std::uint64_t seed) {
    if (threads < 1) throw std::invalid_argument("thread count must be positive");
    if (c.ops == 0) throw std::invalid_argument("operation count must be positive");
    const std::string& p = c.primitive;
    if (p == "mutex") return semaphore_workload(c, threads, seed, 1);
    if (p == "semaphore") return semaphore_workload(c, threads, seed, std::max<std::int64_t>(1, c.param));
    if (p == "barrier") return barrier_workload(c, threads, seed);
    if (p == "latch") return latch_workload(c, threads, seed);
    if (p == "pool-queue") return pool_workload<QueuePool<std::int64_t>>(c, threads, seed);
    if (p == "pool-stack") return pool_workload<StackPool<std::int64_t>>(c, threads, seed);
    if (p == "clh") {
        return lock_workload<ClhBox>(
            c, threads, seed, [](ClhBox& b, baseline::ClhLock::Handle& h) { b.l.lock(h); },
            [](ClhBox& b, baseline::ClhLock::Handle& h) { b.l.unlock(h); });
    }
    if (p == "mcs") {
        return lock_workload<McsBox>(
            c, threads, seed, [](McsBox& b, baseline::McsLock::Node& n) { b.l.lock(n); },
            [](McsBox& b, baseline::McsLock::Node& n) { b.l.unlock(n); });
    }
    throw std::invalid_argument("unknown primitive: " + p);
}

std::vector<double> drop_warmup(const std::vector<double>& samples, double fraction) {
    auto skip = static_cast<std::size_t>(std::floor(static_cast<double>(samples.size()) * fraction));
    return {samples.begin() + static_cast<std::ptrdiff_t>(std::min(skip, samples.size())), samples.end()};
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0;
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0;
    double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

BenchRow run_point(const BenchConfig& c, int threads) {
    std::vector<double> samples;
    for (int i = 0; i < std::max(1, c.iterations); ++i) {
        samples.push_back(measure_iteration(c, threads, c.seed * 1000003u + static_cast<std::uint64_t>(i)));
    }
    auto kept = drop_warmup(samples, c.warmup_fraction);
    BenchRow r;
    r.primitive = c.primitive;
    r.threads = threads;
    r.param = c.primitive == "barrier" ? threads : c.param;
    r.mean_ns = mean(kept);
    r.std_ns = stddev(kept);
    r.ops = c.ops * kept.size();
    return r;
}

std::vector<BenchRow> run_bench(const BenchConfig& c) {
    std::vector<BenchRow> rows;
    for (int t : c.threads) rows.push_back(run_point(c, t));
    return rows;
}

const char* csv_header() { return "primitive,threads,param,mean_ns,std_ns,ops"; }

std::string csv_row(const BenchRow& r) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << r.primitive << ',' << r.threads << ',' << r.param << ',' << r.mean_ns << ',' << r.std_ns << ',' << r.ops;
    return os.str();
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_row(r) << '\n';
}

const std::vector<std::string>& primitives() {
    static const std::vector<std::string> all = {"mutex", "semaphore", "barrier", "latch",
                                                 "pool-queue", "pool-stack", "clh", "mcs"};
    return all;
}

}  // namespace cqs::bench
