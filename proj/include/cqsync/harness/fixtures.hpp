#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include "cqsync/atomic.hpp"
#include "cqsync/cell.hpp"
#include "cqsync/config.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/future.hpp"

// Deliberately broken mutexes. The checker must find a counterexample for each.
CQS_BEGIN_NAMESPACE
namespace fixtures {

// Smart cancellation done naively: the cancellation handler always gives the
// waiter's slot back to the state counter, and resume walks past cancelled
// waiters into the next cell.
class NaiveSmartMutex {
public:
    static constexpr std::size_t kCells = 64;

    NaiveSmartMutex() : cells_(std::make_unique<detail::Atomic<std::uintptr_t>[]>(kCells)) {}

    ~NaiveSmartMutex() {
        for (std::size_t i = 0; i < kCells; ++i) {
            std::uintptr_t w = cells_[i].unchecked().load();
            if (detail::cell_kind(w) == CellKind::request) reinterpret_cast<Waiter*>(w)->release();
        }
    }

    Future<Unit> lock() {
        if (state_.fetch_sub(1) > 0) return Future<Unit>::ready({});
        std::uint64_t i = suspend_idx_.fetch_add(1);
        CQS_ASSERT(i < kCells);
        auto* w = new Waiter(this, i);
        w->add_ref();
        std::uintptr_t cur = detail::kEmptyCell;
        if (cells_[i].compare_exchange(cur, reinterpret_cast<std::uintptr_t>(w))) return Future<Unit>::adopt(w);
        delete w;
        cells_[i].store(detail::kTakenCell);
        return Future<Unit>::ready({});
    }

    void unlock() {
        if (state_.fetch_add(1) < 0) resume();
    }

    std::int64_t state() const { return state_.unchecked().load(); }

    std::size_t value_cells() const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < kCells; ++i) n += detail::cell_kind(cells_[i].unchecked().load()) == CellKind::value;
        return n;
    }

private:
    class Waiter final : public Request<Unit> {
    public:
        Waiter(NaiveSmartMutex* m, std::uint64_t i) : m_(m), i_(i) {}

    protected:
        void on_cancelled() override { m_->on_cancelled(i_); }

    private:
        NaiveSmartMutex* m_;
        std::uint64_t i_;
    };

    void resume() {
        for (;;) {
            std::uint64_t i = resume_idx_.fetch_add(1);
            CQS_ASSERT(i < kCells);
            auto& cell = cells_[i];
            for (;;) {
                std::uintptr_t cur = cell.load();
                if (cur == detail::kEmptyCell) {
                    if (cell.cas(detail::kEmptyCell, detail::kUnitValue)) return;
                    continue;
                }
                if (cur == detail::kCancelledCell) break;
                auto* w = reinterpret_cast<Waiter*>(cur);
                if (!w->complete(Unit{})) break;
                if (detail::cell_kind(cell.exchange(detail::kResumedCell)) == CellKind::request) w->release();
                return;
            }
        }
    }

    void on_cancelled(std::uint64_t i) {
        std::uintptr_t old = cells_[i].exchange(detail::kCancelledCell);
        if (detail::cell_kind(old) == CellKind::request) reinterpret_cast<Waiter*>(old)->release();
        state_.fetch_add(1);
    }

    detail::Atomic<std::int64_t> state_{1};
    detail::Atomic<std::uint64_t> suspend_idx_{0};
    detail::Atomic<std::uint64_t> resume_idx_{0};
    std::unique_ptr<detail::Atomic<std::uintptr_t>[]> cells_;
};

// The plain asynchronous mutex with a try_lock bolted on as a single CAS on
// the state. An unlock can leave its permit parked in a cell, where try_lock
// cannot see it.
class AsyncTryLockMutex {
public:
    explicit AsyncTryLockMutex(std::uint32_t segment_size = 16, bool collect_stats = false)
        : cqs_(make_options(this, segment_size, collect_stats)) {}

    Future<Unit> lock() {
        for (;;) {
            if (state_.fetch_sub(1) > 0) return Future<Unit>::ready({});
            if (auto f = cqs_.suspend()) return std::move(*f);
        }
    }

    void unlock() {
        if (state_.fetch_add(1) < 0) cqs_.resume(Unit{});
    }

    bool try_lock() {
        std::int64_t expected = 1;
        return state_.compare_exchange(expected, 0);
    }

    std::int64_t state() const { return state_.unchecked().load(); }
    Cqs<Unit>& cqs() noexcept { return cqs_; }

private:
    static Cqs<Unit>::Options make_options(AsyncTryLockMutex* self, std::uint32_t segment_size, bool collect_stats) {
        Cqs<Unit>::Options c;
        c.resume_mode = ResumeMode::async;
        c.cancellation_mode = CancellationMode::smart;
        c.segment_size = segment_size;
        c.collect_stats = collect_stats;
        c.on_cancellation = [self] { return self->state_.fetch_add(1) < 0; };
        c.complete_refused_resume = [](Unit) {};
        return c;
    }

    detail::Atomic<std::int64_t> state_{1};
    Cqs<Unit> cqs_;
};

}  // namespace fixtures
CQS_END_NAMESPACE
