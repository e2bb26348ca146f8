#pragma once

#include <atomic>
#include <cstdint>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/future.hpp"

CQS_BEGIN_NAMESPACE

class CountDownLatch {
public:
    static constexpr std::uint32_t kDoneBit = 1u << 31;

    explicit CountDownLatch(std::int64_t count, std::uint32_t segment_size = 16, bool collect_stats = false)
        : count_(count), cqs_(make_options(this, segment_size, collect_stats)) {}

    void count_down() {
        if (count_.fetch_sub(1) <= 1) resume_waiters();
    }

    Future<Unit> await() {
        if (count_.load() <= 0) return Future<Unit>::ready({});
        if ((waiters_.fetch_add(1) & kDoneBit) != 0) return Future<Unit>::ready({});
        auto f = cqs_.suspend();
        CQS_ASSERT(f.has_value());
        return std::move(*f);
    }

    std::int64_t count() const { return count_.unchecked().load(); }
    std::uint32_t waiters_word() const { return waiters_.unchecked().load(); }
    // Resume calls made by the countDown that set the done bit.
    std::uint64_t resumes_issued() const noexcept { return resumes_issued_.load(); }
    Cqs<Unit>& cqs() noexcept { return cqs_; }

private:
    static Cqs<Unit>::Options make_options(CountDownLatch* self, std::uint32_t segment_size, bool collect_stats) {
        Cqs<Unit>::Options c;
        c.cancellation_mode = CancellationMode::smart;
        c.segment_size = segment_size;
        c.collect_stats = collect_stats;
        c.on_cancellation = [self] { return (self->waiters_.fetch_sub(1) & kDoneBit) == 0; };
        c.complete_refused_resume = [](Unit) {};
        return c;
    }

    void resume_waiters() {
        std::uint32_t w = waiters_.load();
        for (;;) {
            if ((w & kDoneBit) != 0) return;
            if (waiters_.compare_exchange(w, w | kDoneBit)) break;
        }
        for (std::uint32_t i = 0; i < w; ++i) {
            resumes_issued_.fetch_add(1, std::memory_order_relaxed);
            cqs_.resume(Unit{});
        }
    }

    detail::Atomic<std::int64_t> count_;
    detail::Atomic<std::uint32_t> waiters_{0};
    std::atomic<std::uint64_t> resumes_issued_{0};
    Cqs<Unit> cqs_;
};

CQS_END_NAMESPACE
