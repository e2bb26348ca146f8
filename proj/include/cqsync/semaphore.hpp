#pragma once

#include <cstdint>
#include <stdexcept>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/future.hpp"

CQS_BEGIN_NAMESPACE

struct PrimitiveOptions {
    ResumeMode resume_mode = ResumeMode::async;
    CancellationMode cancellation_mode = CancellationMode::smart;
    std::uint32_t segment_size = 16;
    std::uint32_t max_spin_cycles = 100;
    bool collect_stats = false;
};

// Fair counting semaphore. state > 0 counts free permits, state < 0 counts
// waiters. try_acquire is only offered with synchronous resumption.
class Semaphore {
public:
    explicit Semaphore(std::int64_t permits, PrimitiveOptions o = {})
        : state_(permits), cqs_(make_options(o, this)) {
        CQS_ASSERT(permits >= 1);
    }

    Future<Unit> acquire() {
        for (;;) {
            if (state_.fetch_sub(1) > 0) return Future<Unit>::ready({});
            if (auto f = cqs_.suspend()) return std::move(*f);
        }
    }

    void release() {
        for (;;) {
            if (state_.fetch_add(1) >= 0) return;
            if (cqs_.resume(Unit{})) return;
        }
    }

    bool try_acquire() {
        if (cqs_.options().resume_mode != ResumeMode::sync) {
            throw std::logic_error("try_acquire requires synchronous resumption");
        }
        std::int64_t s = state_.load();
        while (s > 0) {
            if (state_.compare_exchange(s, s - 1)) return true;
        }
        return false;
    }

    std::int64_t state() const { return state_.unchecked().load(); }
    Cqs<Unit>& cqs() noexcept { return cqs_; }

private:
    static Cqs<Unit>::Options make_options(const PrimitiveOptions& o, Semaphore* self) {
        Cqs<Unit>::Options c;
        c.resume_mode = o.resume_mode;
        c.cancellation_mode = o.cancellation_mode;
        c.segment_size = o.segment_size;
        c.max_spin_cycles = o.max_spin_cycles;
        c.collect_stats = o.collect_stats;
        if (o.cancellation_mode == CancellationMode::smart) {
            c.on_cancellation = [self] { return self->state_.fetch_add(1) < 0; };
            c.complete_refused_resume = [](Unit) {};
        }
        return c;
    }

    detail::Atomic<std::int64_t> state_;
    Cqs<Unit> cqs_;
};

// A semaphore with one permit: 1 unlocked, 0 locked, negative counts waiters.
class Mutex {
public:
    explicit Mutex(PrimitiveOptions o = {}) : sem_(1, o) {}

    Future<Unit> lock() { return sem_.acquire(); }
    void unlock() { sem_.release(); }
    bool try_lock() { return sem_.try_acquire(); }

    std::int64_t state() const { return sem_.state(); }
    Cqs<Unit>& cqs() noexcept { return sem_.cqs(); }

private:
    Semaphore sem_;
};

CQS_END_NAMESPACE
