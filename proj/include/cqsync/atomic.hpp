#pragma once

#include <atomic>
#include <thread>
#include <type_traits>

#include "cqsync/config.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace cqs::runtime {

enum class PointKind : unsigned char { read, write, spin };

// Installed per OS thread by the interleaving explorer. Every shimmed atomic
// operation reports to it before touching memory.
class ScheduleHook {
public:
    virtual void point(PointKind kind, const char* what) = 0;

protected:
    ~ScheduleHook() = default;
};

inline thread_local ScheduleHook* tls_schedule_hook = nullptr;

// Cell whose user callback is running on this thread, if any. The explorer
// keeps one copy per simulated thread.
inline thread_local const void* tls_callback_cell = nullptr;

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    _mm_pause();
#elif defined(__aarch64__)
    asm volatile("yield");
#endif
}

}  // namespace cqs::runtime

CQS_BEGIN_NAMESPACE
namespace detail {

using cqs::runtime::PointKind;

inline void schedule_point([[maybe_unused]] PointKind kind, [[maybe_unused]] const char* what) {
#ifdef CQS_INTERLEAVING_SHIM
    if (auto* hook = cqs::runtime::tls_schedule_hook) hook->point(kind, what);
#endif
}

// Marks one iteration of a wait loop whose exit depends on another thread.
inline void spin_hint() {
#ifdef CQS_INTERLEAVING_SHIM
    if (auto* hook = cqs::runtime::tls_schedule_hook) {
        hook->point(PointKind::spin, "spin");
        return;
    }
#endif
    cqs::runtime::cpu_relax();
}

// Escalating wait for blocking adapters: pause first, then give up the CPU.
class Backoff {
public:
    void pause() {
        if (n_ < 16) {
            for (unsigned i = 0; i < (1u << (n_ / 4)); ++i) cqs::runtime::cpu_relax();
        } else {
            std::this_thread::yield();
        }
        if (n_ < 32) ++n_;
    }
    bool exhausted() const noexcept { return n_ >= 32; }

private:
    unsigned n_ = 0;
};

template <class T>
class Atomic {
    static_assert(std::is_trivially_copyable_v<T>);

public:
    constexpr Atomic() noexcept : v_{} {}
    constexpr Atomic(T v) noexcept : v_(v) {}
    Atomic(const Atomic&) = delete;
    Atomic& operator=(const Atomic&) = delete;

    T load(std::memory_order mo = std::memory_order_seq_cst) const {
        schedule_point(PointKind::read, "load");
        return v_.load(mo);
    }
    void store(T v, std::memory_order mo = std::memory_order_seq_cst) {
        schedule_point(PointKind::write, "store");
        v_.store(v, mo);
    }
    T exchange(T v) {
        schedule_point(PointKind::write, "exchange");
        return v_.exchange(v);
    }
    bool compare_exchange(T& expected, T desired) {
        schedule_point(PointKind::write, "cas");
        return v_.compare_exchange_strong(expected, desired);
    }
    bool cas(T expected, T desired) { return compare_exchange(expected, desired); }

    template <class U = T, class = std::enable_if_t<std::is_integral_v<U>>>
    T fetch_add(T d) {
        schedule_point(PointKind::write, "faa");
        return v_.fetch_add(d);
    }
    template <class U = T, class = std::enable_if_t<std::is_integral_v<U>>>
    T fetch_sub(T d) {
        schedule_point(PointKind::write, "fas");
        return v_.fetch_sub(d);
    }

    // Direct access with no schedule point: for setup, teardown and diagnostics.
    std::atomic<T>& unchecked() noexcept { return v_; }
    const std::atomic<T>& unchecked() const noexcept { return v_; }

private:
    std::atomic<T> v_;
};

}  // namespace detail
CQS_END_NAMESPACE
