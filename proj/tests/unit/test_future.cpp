#include <doctest.h>

#include <atomic>
#include <string>
#include <thread>

#include "cqsync/ebr.hpp"
#include "cqsync/future.hpp"

using namespace cqs;

TEST_CASE("a ready future reports its value and cannot be cancelled") {
    auto f = Future<int>::ready(7);
    CHECK(f.valid());
    CHECK(f.is_immediate());
    CHECK(f.state() == FutureState::completed);
    CHECK(f.get().value() == 7);
    CHECK_FALSE(f.cancel());
    CHECK(f.get().value() == 7);
}

TEST_CASE("a pending request completes exactly once") {
    auto f = make_request<std::string>();
    CHECK(f.state() == FutureState::pending);
    CHECK(f.get().not_yet_ready());
    CHECK(f.complete(std::string("first")));
    CHECK_FALSE(f.complete(std::string("second")));
    CHECK(f.get().value() == "first");
    CHECK_FALSE(f.cancel());
}

TEST_CASE("cancel runs the handler once and wins over later completion") {
    int handler_runs = 0;
    auto f = make_request<int>([&] { ++handler_runs; });
    CHECK(f.cancel());
    CHECK_FALSE(f.cancel());
    CHECK_FALSE(f.complete(3));
    CHECK(handler_runs == 1);
    CHECK(f.get().cancelled());
    CHECK(f.state() == FutureState::cancelled);
}

TEST_CASE("copies share one request") {
    auto f = make_request<int>();
    Future<int> g = f;
    CHECK(g.request() == f.request());
    CHECK(g.complete(5));
    CHECK(f.get().value() == 5);
}

TEST_CASE("a moved-from future is empty") {
    auto f = make_request<int>();
    Future<int> g = std::move(f);
    CHECK_FALSE(f.valid());
    CHECK(g.valid());
    g.complete(1);
}

TEST_CASE("a non-cancellable request refuses cancel") {
    auto* r = new Request<int>(false);
    auto f = Future<int>::adopt(r);
    CHECK_FALSE(f.cancel());
    CHECK(f.state() == FutureState::pending);
    CHECK(f.complete(9));
    CHECK(f.get().value() == 9);
}

TEST_CASE("blocking_get waits for a completion from another thread") {
    auto f = make_request<int>();
    std::thread t([g = f]() mutable {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        g.complete(42);
    });
    CHECK(f.blocking_get().value() == 42);
    t.join();
}

TEST_CASE("blocking_get returns the cancelled mark after a concurrent cancel") {
    auto f = make_request<int>();
    std::thread t([g = f]() mutable { g.cancel(); });
    CHECK(f.blocking_get().cancelled());
    t.join();
}

TEST_CASE("complete and cancel race: exactly one wins") {
    for (int round = 0; round < 200; ++round) {
        std::atomic<int> handler{0};
        auto f = make_request<int>([&] { handler.fetch_add(1); });
        std::atomic<bool> completed{false}, cancelled{false};
        std::thread a([g = f, &completed]() mutable { completed = g.complete(1); });
        std::thread b([g = f, &cancelled]() mutable { cancelled = g.cancel(); });
        a.join();
        b.join();
        CHECK(completed.load() != cancelled.load());
        CHECK(handler.load() == (cancelled.load() ? 1 : 0));
        auto o = f.get();
        CHECK(o.completed() == completed.load());
        CHECK(o.cancelled() == cancelled.load());
    }
}

TEST_CASE("retired requests are destroyed once the last reference goes") {
    cqs::ebr::drain();
    {
        auto f = make_request<int>();
        Future<int> g = f;
        CHECK(cqs::ebr::pending() == 0);
    }
    CHECK(cqs::ebr::pending() == 1);
    cqs::ebr::drain();
    CHECK(cqs::ebr::pending() == 0);
}
