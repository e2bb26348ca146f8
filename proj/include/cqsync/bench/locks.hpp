#pragma once

#include <atomic>
#include <cstdint>
#include <thread>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"

// Classic fair queue spin locks, used as baselines for the mutex benchmark.
// Waiting spins briefly and then yields, so they stay usable when threads
// outnumber cores.
CQS_BEGIN_NAMESPACE
namespace baseline {

namespace detail {
inline void spin_until(const std::atomic<bool>& flag, bool value) {
    cqs::detail::Backoff backoff;
    while (flag.load(std::memory_order_acquire) != value) backoff.pause();
}
}  // namespace detail

class ClhLock {
public:
    struct alignas(64) Node {
        std::atomic<bool> locked{false};
    };

    // Each thread owns one handle and reuses it for every acquisition.
    class Handle {
    public:
        Handle() : node_(new Node) {}
        ~Handle() { delete node_; }
        Handle(const Handle&) = delete;
        Handle& operator=(const Handle&) = delete;

    private:
        friend class ClhLock;
        Node* node_;
        Node* pred_ = nullptr;
    };

    ClhLock() : tail_(new Node) {}
    ~ClhLock() { delete tail_.load(); }

    void lock(Handle& h) {
        h.node_->locked.store(true, std::memory_order_relaxed);
        h.pred_ = tail_.exchange(h.node_, std::memory_order_acq_rel);
        detail::spin_until(h.pred_->locked, false);
    }

    void unlock(Handle& h) {
        Node* mine = h.node_;
        h.node_ = h.pred_;
        mine->locked.store(false, std::memory_order_release);
    }

private:
    std::atomic<Node*> tail_;
};

class McsLock {
public:
    struct alignas(64) Node {
        std::atomic<Node*> next{nullptr};
        std::atomic<bool> locked{false};
    };

    void lock(Node& me) {
        me.next.store(nullptr, std::memory_order_relaxed);
        me.locked.store(true, std::memory_order_relaxed);
        Node* prev = tail_.exchange(&me, std::memory_order_acq_rel);
        if (prev == nullptr) return;
        prev->next.store(&me, std::memory_order_release);
        detail::spin_until(me.locked, false);
    }

    void unlock(Node& me) {
        Node* next = me.next.load(std::memory_order_acquire);
        if (next == nullptr) {
            Node* expected = &me;
            if (tail_.compare_exchange_strong(expected, nullptr, std::memory_order_acq_rel)) return;
            cqs::detail::Backoff backoff;
            while ((next = me.next.load(std::memory_order_acquire)) == nullptr) backoff.pause();
        }
        next->locked.store(false, std::memory_order_release);
    }

private:
    std::atomic<Node*> tail_{nullptr};
};

}  // namespace baseline
CQS_END_NAMESPACE
