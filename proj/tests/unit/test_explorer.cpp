#include <doctest.h>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cqsync/atomic.hpp"
#include "cqsync/harness/explorer.hpp"

using namespace cqs::check;
using cqs::detail::Atomic;

namespace {

// Two unsynchronized read-modify-write increments: the classic lost update.
Program lost_update() {
    auto x = std::make_shared<Atomic<int>>(0);
    Program p;
    for (int t = 0; t < 2; ++t) {
        p.threads.push_back([x] {
            int v = x->load();
            x->store(v + 1);
        });
    }
    p.finish = [x] { require(x->unchecked().load() == 2, "both increments land"); };
    return p;
}

Program atomic_increments() {
    auto x = std::make_shared<Atomic<int>>(0);
    Program p;
    for (int t = 0; t < 2; ++t) p.threads.push_back([x] { x->fetch_add(1); });
    p.finish = [x] { require(x->unchecked().load() == 2, "both increments land"); };
    return p;
}

}  // namespace

TEST_CASE("exhaustive search finds the lost update") {
    ExploreOptions o;
    o.preemption_bound = -1;
    Verdict v = explore(lost_update, o);
    CHECK_FALSE(v.passed);
    CHECK(v.failure == "both increments land");
    CHECK_FALSE(v.counterexample.empty());
}

TEST_CASE("a correct program passes with every interleaving covered") {
    ExploreOptions o;
    o.preemption_bound = -1;
    Verdict v = explore(atomic_increments, o);
    CHECK(v.passed);
    CHECK(v.complete);
    CHECK(v.runs >= 2);
}

TEST_CASE("with no preemptions the lost update is invisible") {
    ExploreOptions o;
    o.preemption_bound = 0;
    o.iterative = false;
    Verdict v = explore(lost_update, o);
    CHECK(v.passed);
    o.preemption_bound = 1;
    v = explore(lost_update, o);
    CHECK_FALSE(v.passed);
    CHECK(v.bound == 1);
}

TEST_CASE("iterative deepening reports the smallest failing bound") {
    ExploreOptions o;
    o.preemption_bound = 3;
    o.iterative = true;
    Verdict v = explore(lost_update, o);
    CHECK_FALSE(v.passed);
    CHECK(v.bound == 1);
}

TEST_CASE("a failing schedule replays to the same failure and trace") {
    ExploreOptions o;
    o.preemption_bound = -1;
    Verdict v = explore(lost_update, o);
    REQUIRE_FALSE(v.passed);
    Verdict r = replay(lost_update, v.schedule);
    CHECK_FALSE(r.passed);
    CHECK(r.failure == v.failure);
    CHECK(format_trace(r.counterexample) == format_trace(v.counterexample));
}

TEST_CASE("random exploration is reproducible from its seed") {
    Verdict a = explore_random(lost_update, 200, 17);
    Verdict b = explore_random(lost_update, 200, 17);
    CHECK(a.passed == b.passed);
    CHECK(a.runs == b.runs);
    CHECK(a.schedule == b.schedule);
    CHECK(format_trace(a.counterexample) == format_trace(b.counterexample));
    CHECK_FALSE(a.passed);
}

TEST_CASE("threads that wait on each other forever are reported as a deadlock") {
    auto factory = [] {
        auto a = std::make_shared<Atomic<int>>(0);
        auto b = std::make_shared<Atomic<int>>(0);
        Program p;
        p.threads.push_back([a] {
            while (a->load() == 0) cqs::detail::spin_hint();
        });
        p.threads.push_back([b] {
            while (b->load() == 0) cqs::detail::spin_hint();
        });
        return p;
    };
    Verdict v = explore(factory, ExploreOptions{});
    CHECK_FALSE(v.passed);
    CHECK(v.failure.find("deadlock") != std::string::npos);
}

TEST_CASE("a write between a waiter's read and its spin is not lost") {
    // The waiter reads the flag, is preempted, the other thread sets it, and
    // only then does the waiter reach its spin point.
    auto factory = [] {
        auto flag = std::make_shared<Atomic<int>>(0);
        Program p;
        p.threads.push_back([flag] {
            while (flag->load() == 0) cqs::detail::spin_hint();
        });
        p.threads.push_back([flag] { flag->store(1); });
        return p;
    };
    ExploreOptions o;
    o.preemption_bound = -1;
    Verdict v = explore(factory, o);
    INFO(v.failure);
    INFO(format_trace(v.counterexample));
    CHECK(v.passed);
    CHECK(v.complete);
}

TEST_CASE("a run that never ends hits the step limit") {
    auto factory = [] {
        auto x = std::make_shared<Atomic<int>>(0);
        Program p;
        p.threads.push_back([x] {
            for (;;) x->fetch_add(1);
        });
        return p;
    };
    ExploreOptions o;
    o.max_steps = 500;
    Verdict v = explore(factory, o);
    CHECK_FALSE(v.passed);
    CHECK(v.failure.find("step limit") != std::string::npos);
}

TEST_CASE("exceptions and failed checks inside a thread become failures") {
    auto throwing = [] {
        Program p;
        p.threads.push_back([] { throw std::runtime_error("boom"); });
        return p;
    };
    Verdict v = explore(throwing, ExploreOptions{});
    CHECK_FALSE(v.passed);
    CHECK(v.failure.find("boom") != std::string::npos);

    auto asserting = [] {
        Program p;
        p.threads.push_back([] { CQS_ASSERT(1 + 1 == 3); });
        return p;
    };
    v = explore(asserting, ExploreOptions{});
    CHECK_FALSE(v.passed);
    CHECK(v.failure.find("1 + 1 == 3") != std::string::npos);
}

TEST_CASE("the run cap marks the search incomplete") {
    auto factory = [] {
        auto x = std::make_shared<Atomic<int>>(0);
        Program p;
        for (int t = 0; t < 3; ++t) {
            p.threads.push_back([x] {
                for (int i = 0; i < 4; ++i) x->fetch_add(1);
            });
        }
        return p;
    };
    ExploreOptions o;
    o.preemption_bound = -1;
    o.max_runs = 50;
    Verdict v = explore(factory, o);
    CHECK(v.passed);
    CHECK_FALSE(v.complete);
    CHECK(v.runs == 50);
}

TEST_CASE("notes and the running thread are visible inside a run") {
    auto factory = [] {
        Program p;
        p.threads.push_back([] {
            CHECK(exploring());
            CHECK(current_thread() == 0);
            note("hello");
            fail("stop here");
        });
        return p;
    };
    Verdict v = explore(factory, ExploreOptions{});
    CHECK_FALSE(v.passed);
    CHECK(v.failure == "stop here");
    CHECK(format_trace(v.counterexample).find("hello") != std::string::npos);
    CHECK_FALSE(exploring());
    CHECK(current_thread() == -1);
}

TEST_CASE("waiters that have seen every write are not rescheduled") {
    // Two threads wait on a flag that a third sets; without the filter the
    // waiters could hand control back and forth for free until the step limit.
    auto factory = [] {
        auto flag = std::make_shared<Atomic<int>>(0);
        Program p;
        for (int t = 0; t < 2; ++t) {
            p.threads.push_back([flag] {
                while (flag->load() == 0) cqs::detail::spin_hint();
            });
        }
        p.threads.push_back([flag] { flag->store(1); });
        return p;
    };
    ExploreOptions o;
    o.preemption_bound = 0;
    o.iterative = false;
    o.max_runs = 1000;
    Verdict v = explore(factory, o);
    INFO(v.failure);
    CHECK(v.passed);
    CHECK(v.complete);
    CHECK(v.max_depth < 40);
}
