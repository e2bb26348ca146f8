#include <doctest.h>

#include <memory>
#include <string>
#include <vector>

#include "cqsync/cqs.hpp"
#include "cqsync/harness/explorer.hpp"

using namespace cqs;

namespace {

Cqs<int>::Options options(ResumeMode r, CancellationMode c, std::uint32_t segm = 4) {
    Cqs<int>::Options o;
    o.resume_mode = r;
    o.cancellation_mode = c;
    o.segment_size = segm;
    o.max_spin_cycles = 4;
    o.collect_stats = true;
    if (c == CancellationMode::smart) {
        o.on_cancellation = [] { return true; };
        o.complete_refused_resume = [](int) {};
    }
    return o;
}

}  // namespace

TEST_CASE("a fresh queue suspends into a pending request") {
    Cqs<int> q(options(ResumeMode::async, CancellationMode::simple));
    auto f = q.suspend();
    REQUIRE(f.has_value());
    CHECK(f->state() == FutureState::pending);
    CHECK(q.cell_kind_at(0) == CellKind::request);
    CHECK(q.resume(3));
    CHECK(f->get().value() == 3);
    CHECK(q.cell_kind_at(0) == CellKind::resumed);
}

TEST_CASE("k suspends then k resumes complete in suspension order") {
    for (auto mode : {CancellationMode::simple, CancellationMode::smart}) {
        for (auto resume : {ResumeMode::async, ResumeMode::sync}) {
            for (int k = 1; k <= 64; ++k) {
                Cqs<int> q(options(resume, mode, 3));
                std::vector<Future<int>> fs;
                for (int i = 0; i < k; ++i) fs.push_back(*q.suspend());
                for (int i = 0; i < k; ++i) {
                    CHECK(q.resume(i));
                    CHECK(fs[static_cast<std::size_t>(i)].get().value() == i);
                    if (i + 1 < k) CHECK(fs[static_cast<std::size_t>(i) + 1].state() == FutureState::pending);
                }
                CHECK(q.stats().balanced());
            }
        }
    }
}

TEST_CASE("an asynchronous resume before its suspend is eliminated") {
    Cqs<int> q(options(ResumeMode::async, CancellationMode::simple));
    CHECK(q.resume(11));
    CHECK(q.cell_kind_at(0) == CellKind::value);
    auto f = q.suspend();
    REQUIRE(f.has_value());
    CHECK(f->is_immediate());
    CHECK(f->get().value() == 11);
    CHECK(q.cell_kind_at(0) == CellKind::taken);
    CHECK(q.stats().values_taken.load() == 1);
}

TEST_CASE("values of non-trivial types pass through cells intact") {
    Cqs<std::string>::Options o;
    Cqs<std::string> q(o);
    CHECK(q.resume(std::string(100, 'x')));
    auto f = q.suspend();
    CHECK(f->get().value() == std::string(100, 'x'));
    auto g = q.suspend();
    CHECK(q.resume(std::string("late")));
    CHECK(g->get().value() == "late");
}

TEST_CASE("a synchronous resume with no partner breaks the cell") {
    Cqs<int> q(options(ResumeMode::sync, CancellationMode::simple));
    CHECK_FALSE(q.resume(1));
    CHECK(q.cell_kind_at(0) == CellKind::broken);
    CHECK(q.stats().broken_cells.load() == 1);
    CHECK_FALSE(q.suspend().has_value());
    auto f = q.suspend();
    REQUIRE(f.has_value());
    CHECK(q.resume(2));
    CHECK(f->get().value() == 2);
}

TEST_CASE("simple cancellation leaves a cancelled cell that fails its resume") {
    Cqs<int> q(options(ResumeMode::async, CancellationMode::simple, 2));
    auto f = *q.suspend();
    auto g = *q.suspend();
    CHECK(f.cancel());
    CHECK(q.cell_kind_at(0) == CellKind::cancelled);
    CHECK(q.stats().cancelled_cells.load() == 1);
    CHECK_FALSE(q.resume(1));
    CHECK(q.resume(2));
    CHECK(g.get().value() == 2);
}

TEST_CASE("smart cancellation lets the resume skip the cancelled waiter") {
    Cqs<int> q(options(ResumeMode::async, CancellationMode::smart, 2));
    auto f = *q.suspend();
    auto g = *q.suspend();
    CHECK(f.cancel());
    CHECK(q.cell_kind_at(0) == CellKind::cancelled);
    CHECK(q.resume(5));
    CHECK(g.get().value() == 5);
    CHECK(q.stats().balanced());
}

TEST_CASE("smart resume skips a whole run of cancelled segments") {
    Cqs<int> q(options(ResumeMode::async, CancellationMode::smart, 2));
    std::vector<Future<int>> fs;
    for (int i = 0; i < 11; ++i) fs.push_back(*q.suspend());
    for (int i = 0; i < 10; ++i) CHECK(fs[static_cast<std::size_t>(i)].cancel());
    CHECK(q.resume(9));
    CHECK(fs[10].get().value() == 9);
    CHECK(q.segments().reachable_segments() <= 3);
}

TEST_CASE("a refused cancellation hands the next resume to the refusal callback") {
    std::vector<int> refused;
    Cqs<int>::Options o = options(ResumeMode::async, CancellationMode::smart);
    o.on_cancellation = [] { return false; };
    o.complete_refused_resume = [&](int v) { refused.push_back(v); };
    Cqs<int> q(o);
    auto f = *q.suspend();
    CHECK(f.cancel());
    CHECK(q.cell_kind_at(0) == CellKind::refused);
    CHECK(q.resume(4));
    CHECK(refused == std::vector<int>{4});
    CHECK(q.stats().refused_completions.load() == 1);
    CHECK(q.stats().balanced());
}

TEST_CASE("a queue destroyed with waiters and values in it releases them") {
    Cqs<std::string> q(Cqs<std::string>::Options{});
    auto f = q.suspend();
    q.resume(std::string("a"));
    q.resume(std::string("b"));
    CHECK(f->get().value() == "a");
    auto g = q.suspend();
    CHECK(g->get().value() == "b");
    q.suspend();
}

TEST_CASE("the cell life cycle admits only its edges") {
    using K = CellKind;
    using detail::legal_transition;
    CHECK(legal_transition(K::empty, K::value));
    CHECK(legal_transition(K::empty, K::request));
    CHECK(legal_transition(K::value, K::taken));
    CHECK(legal_transition(K::value, K::broken));
    CHECK(legal_transition(K::request, K::resumed));
    CHECK(legal_transition(K::request, K::cancelled));
    CHECK(legal_transition(K::request, K::refused));
    CHECK(legal_transition(K::request, K::value));
    CHECK(legal_transition(K::value, K::cancelled));
    CHECK(legal_transition(K::value, K::refused));
    for (K terminal : {K::taken, K::broken, K::resumed, K::cancelled, K::refused}) {
        for (int to = 0; to <= static_cast<int>(K::refused); ++to) CHECK_FALSE(legal_transition(terminal, static_cast<K>(to)));
    }
    CHECK_FALSE(legal_transition(K::empty, K::cancelled));
    CHECK_FALSE(legal_transition(K::request, K::taken));
}

TEST_CASE("cell words decode to their kinds") {
    CHECK(detail::cell_kind(detail::kEmptyCell) == CellKind::empty);
    CHECK(detail::cell_kind(detail::kUnitValue) == CellKind::value);
    CHECK(detail::cell_kind(detail::kTakenCell) == CellKind::taken);
    CHECK(detail::cell_kind(detail::kBrokenCell) == CellKind::broken);
    CHECK(detail::cell_kind(detail::kResumedCell) == CellKind::resumed);
    CHECK(detail::cell_kind(detail::kCancelledCell) == CellKind::cancelled);
    CHECK(detail::cell_kind(detail::kRefusedCell) == CellKind::refused);
    int x = 0;
    CHECK(detail::cell_kind(reinterpret_cast<std::uintptr_t>(&x) & ~std::uintptr_t{7}) == CellKind::request);
}

namespace {

// One waiter that cancels and one resumer, sharing a counter in the style of a
// semaphore with no permits: each side holds the permit its partner needs.
struct CancelVsResume {
    ResumeMode mode;
    std::shared_ptr<bool> saw_delegation = std::make_shared<bool>(false);

    cqs::check::Program operator()() const {
        using cqs::check::require;
        struct State {
            detail::Atomic<std::int64_t> counter{0};
            std::unique_ptr<Cqs<int>> q;
            std::vector<int> refused;
            Future<int> f;
            bool cancelled = false;
        };
        auto st = std::make_shared<State>();
        Cqs<int>::Options o;
        o.resume_mode = mode;
        o.cancellation_mode = CancellationMode::smart;
        o.segment_size = 1;
        o.max_spin_cycles = 2;
        o.collect_stats = true;
        State* raw = st.get();
        o.on_cancellation = [raw] { return raw->counter.fetch_add(1) < 0; };
        o.complete_refused_resume = [raw](int v) { raw->refused.push_back(v); };
        st->q = std::make_unique<Cqs<int>>(o);

        cqs::check::Program p;
        p.threads.push_back([st] {
            for (;;) {
                if (st->counter.fetch_sub(1) > 0) return;
                auto f = st->q->suspend();
                if (!f) continue;
                st->f = *f;
                break;
            }
            st->cancelled = st->f.cancel();
        });
        p.threads.push_back([st] {
            for (;;) {
                if (st->counter.fetch_add(1) >= 0) return;
                if (st->q->resume(7)) return;
            }
        });
        auto seen = saw_delegation;
        p.finish = [st, seen] {
            const auto& s = st->q->stats();
            require(s.balanced(), "every successful resume delivers exactly once");
            if (s.delegations.load() > 0) *seen = true;
            const bool completed = st->f.valid() && st->f.get().completed();
            const std::uint64_t delivered = (completed ? 1u : 0u) + st->refused.size();
            require(delivered == s.resume_true.load(), "deliveries match successful resumes");
            const std::int64_t expected = st->cancelled ? 1 : 0;
            require(st->counter.unchecked().load() == expected, "a cancelled waiter leaves its permit behind");
            require(!st->cancelled || !completed, "a cancelled waiter is never completed");
        };
        return p;
    }
};

}  // namespace

TEST_CASE("cancel racing resume keeps resumes balanced under every interleaving") {
    for (ResumeMode m : {ResumeMode::async, ResumeMode::sync}) {
        CAPTURE(std::string(to_string(m)));
        CancelVsResume prog{m};
        cqs::check::ExploreOptions o;
        o.preemption_bound = 6;
        auto v = cqs::check::explore(prog, o);
        INFO(v.failure);
        INFO(cqs::check::format_trace(v.counterexample));
        CHECK(v.passed);
        CHECK(v.complete);
        if (m == ResumeMode::async) CHECK(*prog.saw_delegation);
    }
}

TEST_CASE("suspend and resume race to the same cell") {
    for (ResumeMode m : {ResumeMode::async, ResumeMode::sync}) {
        auto factory = [m] {
            struct State {
                std::unique_ptr<Cqs<int>> q;
                Future<int> f;
                bool resumed = false;
                bool suspended = false;
            };
            auto st = std::make_shared<State>();
            st->q = std::make_unique<Cqs<int>>(options(m, CancellationMode::simple, 1));
            cqs::check::Program p;
            p.threads.push_back([st] {
                auto f = st->q->suspend();
                st->suspended = f.has_value();
                if (f) st->f = *f;
            });
            p.threads.push_back([st] { st->resumed = st->q->resume(1); });
            p.finish = [st] {
                using cqs::check::require;
                require(st->resumed == st->suspended, "a rendezvous either happens for both sides or for neither");
                if (st->suspended) require(st->f.get().completed() && st->f.get().value() == 1, "the value arrives");
                require(st->q->stats().balanced(), "every successful resume delivers exactly once");
            };
            return p;
        };
        cqs::check::ExploreOptions o;
        o.preemption_bound = 6;
        auto v = cqs::check::explore(factory, o);
        INFO(v.failure);
        CHECK(v.passed);
        CHECK(v.complete);
    }
}
