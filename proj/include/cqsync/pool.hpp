#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "cqsync/atomic.hpp"
#include "cqsync/cell.hpp"
#include "cqsync/config.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/ebr.hpp"
#include "cqsync/future.hpp"
#include "cqsync/segment_list.hpp"

CQS_BEGIN_NAMESPACE

namespace detail {
inline constexpr std::uintptr_t kBrokenSlot = (6 << 3) | 2;
}

// Elements in an infinite array with separate insert and retrieve indices.
// A retrieve that reaches a slot before its insert breaks it, failing both.
template <class E>
class QueueStore {
public:
    explicit QueueStore(std::uint32_t segment_size = 16) : list_(segment_size, false) {}

    ~QueueStore() {
        list_.for_each_allocated([](Segment& s) {
            for (std::uint32_t i = 0; i < s.size(); ++i) {
                std::uintptr_t w = s.cell(i).unchecked().load();
                if (w != detail::kEmptyCell && w != detail::kBrokenSlot) detail::ValueCodec<E>::dispose(w);
            }
        });
    }

    // Consumes e only on success.
    bool try_insert(E& e) {
        ebr::Guard guard;
        auto& cell = slot(list_.step(list_.iterator(kInsert)));
        std::uintptr_t w = detail::ValueCodec<E>::encode(std::move(e));
        if (cell.cas(detail::kEmptyCell, w)) return true;
        e = detail::ValueCodec<E>::take(w);
        return false;
    }

    std::optional<E> try_retrieve() {
        ebr::Guard guard;
        auto& cell = slot(list_.step(list_.iterator(kRetrieve)));
        std::uintptr_t old = cell.exchange(detail::kBrokenSlot);
        if (old == detail::kEmptyCell) return std::nullopt;
        return detail::ValueCodec<E>::take(old);
    }

    SegmentList& segments() noexcept { return list_; }

private:
    static constexpr int kInsert = 0;
    static constexpr int kRetrieve = 1;

    detail::Atomic<std::uintptr_t>& slot(const SegmentList::Step& st) {
        CQS_ASSERT(st.found);
        return st.segment->cell(static_cast<std::uint32_t>(st.index % list_.segment_size()));
    }

    SegmentList list_;
};

// Treiber stack whose nodes hold either an element or a fail mark. A retrieve
// on an empty stack leaves a fail mark that the next insert consumes.
template <class E>
class StackStore {
public:
    StackStore() = default;
    explicit StackStore(std::uint32_t) {}

    ~StackStore() {
        Node* n = top_.unchecked().load();
        while (n != nullptr) delete std::exchange(n, n->next);
    }

    bool try_insert(E& e) {
        ebr::Guard guard;
        Node* node = nullptr;
        for (;;) {
            Node* top = top_.load();
            if (top != nullptr && !top->element) {
                if (top_.cas(top, top->next)) {
                    ebr::retire(top);
                    if (node != nullptr) {
                        e = std::move(*node->element);
                        delete node;
                    }
                    return false;
                }
                continue;
            }
            if (node == nullptr) node = new Node{std::move(e), nullptr};
            node->next = top;
            if (top_.cas(top, node)) return true;
        }
    }

    std::optional<E> try_retrieve() {
        ebr::Guard guard;
        Node* mark = nullptr;
        for (;;) {
            Node* top = top_.load();
            if (top == nullptr || !top->element) {
                if (mark == nullptr) mark = new Node{std::nullopt, nullptr};
                mark->next = top;
                if (top_.cas(top, mark)) return std::nullopt;
                continue;
            }
            if (top_.cas(top, top->next)) {
                std::optional<E> e = std::move(top->element);
                ebr::retire(top);
                delete mark;
                return e;
            }
        }
    }

private:
    struct Node {
        std::optional<E> element;  // empty for a fail mark
        Node* next;
    };

    detail::Atomic<Node*> top_{nullptr};
};

struct PoolOptions {
    std::uint32_t segment_size = 16;
    bool collect_stats = false;
    std::function<void()> retry_backoff;  // called before each put/take retry
};

// size >= 0 counts stored elements, size < 0 counts waiting takers.
template <class E, class Store>
class BlockingPool {
public:
    explicit BlockingPool(PoolOptions o = {})
        : backoff_(std::move(o.retry_backoff)), store_(o.segment_size), cqs_(make_options(this, o)) {}

    void put(E e) {
        for (;;) {
            if (size_.fetch_add(1) < 0) {
                [[maybe_unused]] bool ok = cqs_.resume(std::move(e));
                CQS_ASSERT(ok);
                return;
            }
            if (store_.try_insert(e)) return;
            if (backoff_) backoff_();
        }
    }

    Future<E> take() {
        for (;;) {
            if (size_.fetch_sub(1) > 0) {
                if (auto e = store_.try_retrieve()) return Future<E>::ready(std::move(*e));
                if (backoff_) backoff_();
                continue;
            }
            auto f = cqs_.suspend();
            CQS_ASSERT(f.has_value());
            return std::move(*f);
        }
    }

    std::int64_t size() const { return size_.unchecked().load(); }
    Cqs<E>& cqs() noexcept { return cqs_; }
    Store& store() noexcept { return store_; }

private:
    static typename Cqs<E>::Options make_options(BlockingPool* self, const PoolOptions& o) {
        typename Cqs<E>::Options c;
        c.cancellation_mode = CancellationMode::smart;
        c.segment_size = o.segment_size;
        c.collect_stats = o.collect_stats;
        c.on_cancellation = [self] { return self->size_.fetch_add(1) < 0; };
        c.complete_refused_resume = [self](E e) {
            if (!self->store_.try_insert(e)) self->put(std::move(e));
        };
        return c;
    }

    detail::Atomic<std::int64_t> size_{0};
    std::function<void()> backoff_;
    Store store_;
    Cqs<E> cqs_;
};

template <class E>
using QueuePool = BlockingPool<E, QueueStore<E>>;
template <class E>
using StackPool = BlockingPool<E, StackStore<E>>;

CQS_END_NAMESPACE
