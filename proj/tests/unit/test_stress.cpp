#include <doctest.h>

#include <stdexcept>
#include <string>

#include "cqsync/harness/stress.hpp"

using namespace cqs::check;

namespace {

StressOptions small(std::string primitive, std::string resume = "async", std::string cancel = "smart") {
    StressOptions o;
    o.primitive = std::move(primitive);
    o.resume_mode = std::move(resume);
    o.cancellation_mode = std::move(cancel);
    o.threads = 6;
    o.ops_per_thread = 2000;
    o.segment_size = 2;
    return o;
}

void expect_clean(const StressOptions& o) {
    StressReport r = run_stress(o);
    CAPTURE(describe(o));
    for (const auto& msg : r.violations) INFO(msg);
    CHECK(r.passed);
    CHECK(r.violation_count == 0);
    CHECK(r.ops >= o.ops_per_thread * static_cast<std::uint64_t>(o.threads));
    if (o.cancel_rate == 0.0) CHECK(r.cancelled == 0);
}

}  // namespace

TEST_CASE("locks stay within their permits in every mode and cancellation rate") {
    for (const char* prim : {"mutex", "semaphore"}) {
        for (const char* r : {"async", "sync"}) {
            for (const char* c : {"smart", "simple"}) {
                for (double rate : {0.0, 0.1, 0.5}) {
                    StressOptions o = small(prim, r, c);
                    o.param = 3;
                    o.cancel_rate = rate;
                    expect_clean(o);
                }
            }
        }
    }
}

TEST_CASE("cancellations actually happen when asked for") {
    StressOptions o = small("semaphore");
    o.param = 1;
    o.cancel_rate = 0.5;
    StressReport r = run_stress(o);
    CHECK(r.passed);
    CHECK(r.cancelled > 0);
}

TEST_CASE("barrier, latch and pools keep their invariants") {
    for (const char* prim : {"barrier", "latch", "pool-queue", "pool-stack"}) {
        for (double rate : {0.0, 0.1, 0.5}) {
            StressOptions o = small(prim);
            o.cancel_rate = rate;
            expect_clean(o);
        }
    }
}

TEST_CASE("a single thread runs every workload without waiting forever") {
    for (const char* prim : {"mutex", "semaphore", "barrier", "pool-queue"}) {
        StressOptions o = small(prim);
        o.threads = prim == std::string("pool-queue") ? 2 : 1;
        o.ops_per_thread = 500;
        expect_clean(o);
    }
}

TEST_CASE("an unknown workload is rejected") {
    CHECK_THROWS_AS(run_stress(small("spinlock")), std::invalid_argument);
}

TEST_CASE("describe mentions the primitive and the run shape") {
    StressOptions o = small("semaphore");
    o.param = 4;
    std::string d = describe(o);
    CHECK(d.find("semaphore") != std::string::npos);
    CHECK(d.find("K=4") != std::string::npos);
    CHECK(d.find("threads=6") != std::string::npos);
}
