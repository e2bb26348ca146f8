#include "cqsync/harness/stress.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cqsync/cqsync.hpp"

namespace cqs::check {
namespace {

class Violations {
public:
    void check(bool ok, const std::string& what) {
        if (ok) return;
        count_.fetch_add(1);
        std::lock_guard<std::mutex> lock(m_);
        if (msgs_.size() < 8) msgs_.push_back(what);
    }

    void into(StressReport& r) {
        r.violation_count = count_.load();
        r.violations = msgs_;
        r.passed = r.violation_count == 0;
    }

private:
    std::atomic<std::uint64_t> count_{0};
    std::mutex m_;
    std::vector<std::string> msgs_;
};

template <class Body>
void run_threads(int n, Body body) {
    std::vector<std::thread> ts;
    ts.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) ts.emplace_back(body, t);
    for (auto& th : ts) th.join();
}

std::mt19937_64 thread_rng(const StressOptions& o, int t) {
    std::seed_seq seq{o.seed, static_cast<std::uint64_t>(t), std::uint64_t{0x51ed}};
    return std::mt19937_64(seq);
}

template <class T>
void check_queue(Violations& v, Cqs<T>& q, const std::string& where) {
    v.check(q.stats().balanced(), where + ": successful resumes and deliveries differ");
    v.check(q.segments().reachable_segments() <= 3, where + ": more than three segments reachable with no waiters");
}

void stress_semaphore(const StressOptions& o, StressReport& r, Violations& v) {
    PrimitiveOptions po;
    po.resume_mode = o.resume_mode == "sync" ? ResumeMode::sync : ResumeMode::async;
    po.cancellation_mode = o.cancellation_mode == "simple" ? CancellationMode::simple : CancellationMode::smart;
    po.segment_size = o.segment_size;
    po.collect_stats = true;
    const std::int64_t permits = o.primitive == "mutex" ? 1 : o.param;
    const bool sync = po.resume_mode == ResumeMode::sync;
    Semaphore sem(permits, po);
    std::atomic<std::int64_t> occupancy{0};
    std::atomic<std::uint64_t> acquired{0}, released{0}, cancelled{0}, ops{0};

    run_threads(o.threads, [&](int t) {
        auto rng = thread_rng(o, t);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::uint64_t i = 0; i < o.ops_per_thread; ++i) {
            ops.fetch_add(1, std::memory_order_relaxed);
            if (sync && coin(rng) < 0.1) {
                if (!sem.try_acquire()) continue;
            } else {
                Future<Unit> f = sem.acquire();
                if (f.state() == FutureState::pending && coin(rng) < o.cancel_rate && f.cancel()) {
                    cancelled.fetch_add(1, std::memory_order_relaxed);
                    continue;
                }
                v.check(f.blocking_get().completed(), "an acquire was neither completed nor cancelled");
            }
            acquired.fetch_add(1, std::memory_order_relaxed);
            std::int64_t occ = occupancy.fetch_add(1) + 1;
            v.check(occ <= permits, "more holders than permits");
            if ((i & 63) == 0) std::this_thread::yield();
            occupancy.fetch_sub(1);
            released.fetch_add(1, std::memory_order_relaxed);
            sem.release();
        }
    });

    v.check(sem.state() == permits, "permits not conserved at the end");
    v.check(acquired.load() == released.load(), "acquisitions and releases differ");
    const auto& st = sem.cqs().stats();
    v.check(st.cancelled_cells.load() + st.refused_cells.load() == cancelled.load(),
            "successful cancels and cancelled cells differ");
    check_queue(v, sem.cqs(), "semaphore");
    r.ops = ops.load();
    r.cancelled = cancelled.load();
}

void stress_barrier(const StressOptions& o, StressReport& r, Violations& v) {
    const std::uint64_t rounds = o.ops_per_thread;
    std::vector<std::unique_ptr<Barrier>> bs;
    bs.reserve(rounds);
    for (std::uint64_t i = 0; i < rounds; ++i) bs.push_back(std::make_unique<Barrier>(o.threads, o.segment_size, true));

    run_threads(o.threads, [&](int t) {
        auto rng = thread_rng(o, t);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::uint64_t i = 0; i < rounds; ++i) {
            Future<Unit> f = bs[i]->arrive();
            if (coin(rng) < o.cancel_rate) v.check(!f.cancel(), "a barrier arrival was cancelled");
            v.check(f.blocking_get().completed(), "a barrier arrival did not complete");
            v.check(bs[i]->remaining() == 0, "a barrier released a party before all arrived");
        }
    });

    for (auto& b : bs) {
        v.check(b->remaining() == 0, "a barrier round did not finish");
        check_queue(v, b->cqs(), "barrier");
    }
    r.ops = rounds * static_cast<std::uint64_t>(o.threads);
}

void stress_latch(const StressOptions& o, StressReport& r, Violations& v) {
    const std::uint64_t rounds = o.ops_per_thread;
    const int counters = std::max(1, o.threads / 2);
    std::vector<std::unique_ptr<CountDownLatch>> ls;
    ls.reserve(rounds);
    for (std::uint64_t i = 0; i < rounds; ++i) {
        ls.push_back(std::make_unique<CountDownLatch>(counters, o.segment_size, true));
    }
    std::atomic<std::uint64_t> cancelled{0}, ops{0};

    run_threads(o.threads, [&](int t) {
        auto rng = thread_rng(o, t);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::uint64_t i = 0; i < rounds; ++i) {
            CountDownLatch& l = *ls[i];
            if (t < counters) {
                l.count_down();
                ops.fetch_add(1, std::memory_order_relaxed);
            }
            ops.fetch_add(1, std::memory_order_relaxed);
            Future<Unit> f = l.await();
            if (f.state() == FutureState::pending && coin(rng) < o.cancel_rate && f.cancel()) {
                cancelled.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            v.check(f.blocking_get().completed(), "a latch await did not complete");
            v.check(l.count() <= 0, "a latch await completed while the count was positive");
        }
    });

    for (auto& l : ls) {
        v.check(l->count() == 0, "a latch did not reach zero");
        const auto& st = l->cqs().stats();
        v.check(st.resume_false.load() == 0, "a latch resume failed");
        v.check(l->resumes_issued() == st.resume_true.load(), "latch resumes issued and performed differ");
        check_queue(v, l->cqs(), "latch");
    }
    r.ops = ops.load();
    r.cancelled = cancelled.load();
}

// Even threads put, odd threads take, so takers really wait and can cancel.
template <class Pool>
void stress_pool(const StressOptions& o, StressReport& r, Violations& v) {
    PoolOptions po;
    po.segment_size = o.segment_size;
    po.collect_stats = true;
    Pool pool(po);
    const std::uint64_t n = o.ops_per_thread;
    std::vector<std::vector<std::uint64_t>> got(static_cast<std::size_t>(o.threads));
    std::atomic<std::uint64_t> cancelled{0}, puts{0};

    run_threads(o.threads, [&](int t) {
        auto rng = thread_rng(o, t);
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (t % 2 == 0) {
            for (std::uint64_t i = 0; i < n; ++i) {
                pool.put((static_cast<std::uint64_t>(t) << 32) | i);
                if ((i & 63) == 0) std::this_thread::yield();
            }
            puts.fetch_add(n);
            return;
        }
        auto& mine = got[static_cast<std::size_t>(t)];
        for (std::uint64_t i = 0; i < n; ++i) {
            Future<std::uint64_t> f = pool.take();
            if (f.state() == FutureState::pending && coin(rng) < o.cancel_rate && f.cancel()) {
                cancelled.fetch_add(1, std::memory_order_relaxed);
                continue;
            }
            auto out = f.blocking_get();
            v.check(out.completed(), "a take did not complete");
            if (out.completed()) mine.push_back(out.value());
        }
    });

    std::vector<std::uint64_t> all;
    for (auto& g : got) all.insert(all.end(), g.begin(), g.end());
    while (pool.size() > 0) {
        auto out = pool.take().get();
        v.check(out.completed(), "a take from a non-empty pool did not complete at once");
        if (!out.completed()) break;
        all.push_back(out.value());
    }
    v.check(pool.size() == 0, "the pool size is not zero after draining");
    std::sort(all.begin(), all.end());
    v.check(std::adjacent_find(all.begin(), all.end()) == all.end(), "an element was delivered twice");
    v.check(all.size() == puts.load(), "elements were lost");
    for (std::uint64_t e : all) {
        const std::uint64_t t = e >> 32;
        if (t >= static_cast<std::uint64_t>(o.threads) || t % 2 != 0 || (e & 0xffffffffu) >= n) {
            v.check(false, "an element that was never inserted was delivered");
            break;
        }
    }
    const auto& st = pool.cqs().stats();
    v.check(st.cancelled_cells.load() + st.refused_cells.load() == cancelled.load(),
            "successful cancels and cancelled cells differ");
    check_queue(v, pool.cqs(), "pool");
    r.ops = n * static_cast<std::uint64_t>(o.threads);
    r.cancelled = cancelled.load();
}

}  // namespace

std::string describe(const StressOptions& o) {
    std::ostringstream os;
    os << o.primitive;
    if (o.primitive == "mutex" || o.primitive == "semaphore") os << "[" << o.resume_mode << "/" << o.cancellation_mode;
    if (o.primitive == "semaphore") os << " K=" << o.param;
    if (o.primitive == "mutex" || o.primitive == "semaphore") os << "]";
    os << " threads=" << o.threads << " ops=" << o.ops_per_thread << " cancel=" << o.cancel_rate
       << " seed=" << o.seed;
    return os.str();
}

StressReport run_stress(const StressOptions& o) {
    StressReport r;
    Violations v;
    auto t0 = std::chrono::steady_clock::now();
    if (o.primitive == "mutex" || o.primitive == "semaphore") {
        stress_semaphore(o, r, v);
    } else if (o.primitive == "barrier") {
        stress_barrier(o, r, v);
    } else if (o.primitive == "latch") {
        stress_latch(o, r, v);
    } else if (o.primitive == "pool-queue") {
        stress_pool<QueuePool<std::uint64_t>>(o, r, v);
    } else if (o.primitive == "pool-stack") {
        stress_pool<StackPool<std::uint64_t>>(o, r, v);
    } else {
        throw std::invalid_argument("no stress workload for " + o.primitive);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.into(r);
    return r;
}

}  // namespace cqs::check
