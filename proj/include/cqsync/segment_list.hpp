#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <memory>
#include <unordered_set>
#include <vector>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"
#include "cqsync/ebr.hpp"

CQS_BEGIN_NAMESPACE

class SegmentList;
class SegmentPool;

// A block of cells in the emulated infinite array. Cell words are opaque here;
// the owner decides their encoding, with 0 meaning empty.
class Segment {
public:
    static constexpr std::uint32_t kRefUnit = 1u << 16;
    static constexpr std::uint32_t kCancelledMask = kRefUnit - 1;
    static constexpr std::uint64_t kFreeId = std::numeric_limits<std::uint64_t>::max();

    Segment(SegmentPool* pool, std::uint32_t size)
        : pool_(pool), size_(size), cells_(new detail::Atomic<std::uintptr_t>[size]) {}

    std::uint64_t id() const noexcept { return id_.load(std::memory_order_acquire); }
    std::uint32_t size() const noexcept { return size_; }
    detail::Atomic<std::uintptr_t>& cell(std::uint32_t i) noexcept { return cells_[i]; }

    Segment* next() const { return next_.load(); }
    Segment* prev() const { return prev_.load(); }

    bool removed() const { return is_removed(packed_.load()); }

    bool try_inc_pointers() {
        std::uint32_t p = packed_.load();
        for (;;) {
            if (is_removed(p)) return false;
            if (packed_.compare_exchange(p, p + kRefUnit)) return true;
        }
    }

    // Returns true if the segment became logically removed.
    bool dec_pointers() { return is_removed(packed_.fetch_sub(kRefUnit) - kRefUnit); }

    // Marks that nobody will touch one more cell of this segment again.
    void resolve_cell() noexcept { resolved_.fetch_add(1, std::memory_order_acq_rel); }

    std::uint32_t iter_refs() const noexcept { return packed_.unchecked().load() >> 16; }
    std::uint32_t cancelled_cells() const noexcept { return packed_.unchecked().load() & kCancelledMask; }
    std::uint32_t resolved_cells() const noexcept { return resolved_.load(); }

private:
    friend class SegmentList;
    friend class SegmentPool;

    bool is_removed(std::uint32_t packed) const noexcept {
        return (packed & kCancelledMask) == size_ && (packed >> 16) == 0;
    }

    void reset(std::uint64_t id, Segment* prev, std::uint32_t packed) {
        next_.unchecked().store(nullptr);
        prev_.unchecked().store(prev);
        packed_.unchecked().store(packed);
        resolved_.store(0);
        alloc_next_.store(nullptr);
        for (std::uint32_t i = 0; i < size_; ++i) cells_[i].unchecked().store(0);
        id_.store(id, std::memory_order_release);
    }

    std::atomic<std::uint64_t> id_{kFreeId};
    detail::Atomic<Segment*> next_{nullptr};
    detail::Atomic<Segment*> prev_{nullptr};
    detail::Atomic<std::uint32_t> packed_{0};
    std::atomic<std::uint32_t> resolved_{0};
    std::atomic<Segment*> alloc_next_{nullptr};
    std::atomic<Segment*> free_next_{nullptr};
    SegmentPool* const pool_;
    const std::uint32_t size_;
    std::unique_ptr<detail::Atomic<std::uintptr_t>[]> cells_;
};

// Type-stable storage for one list's segments. Segments are recycled, never
// freed, until both the list and every segment awaiting reclamation are gone.
class SegmentPool {
public:
    explicit SegmentPool(std::uint32_t segment_size) : segment_size_(segment_size) {}
    ~SegmentPool() {
        Segment* s = unpack(free_top_.load());
        while (s != nullptr) {
            Segment* n = s->free_next_.load();
            delete s;
            s = n;
        }
    }

    Segment* acquire(std::uint64_t id, Segment* prev, std::uint32_t packed) {
        Segment* s = pop();
        if (s == nullptr) {
            s = new Segment(this, segment_size_);
            created_.fetch_add(1, std::memory_order_relaxed);
        }
        s->reset(id, prev, packed);
        return s;
    }

    // For segments that were never published.
    void give_back(Segment* s) {
        s->id_.store(Segment::kFreeId, std::memory_order_release);
        push(s);
    }

    void retire(Segment* s) {
        refs_.fetch_add(1, std::memory_order_relaxed);
        ebr::retire(s, &SegmentPool::recycle);
    }

    void release() {
        if (refs_.fetch_sub(1, std::memory_order_acq_rel) == 1) delete this;
    }

    std::size_t created() const noexcept { return created_.load(std::memory_order_relaxed); }

private:
    static constexpr std::uint64_t kPtrMask = (std::uint64_t{1} << 48) - 1;

    static Segment* unpack(std::uint64_t v) noexcept {
        return reinterpret_cast<Segment*>(static_cast<std::uintptr_t>(v & kPtrMask));
    }
    static std::uint64_t pack(Segment* s, std::uint64_t tag) noexcept {
        return (reinterpret_cast<std::uintptr_t>(s) & kPtrMask) | (tag << 48);
    }

    static void recycle(void* p) {
        auto* s = static_cast<Segment*>(p);
        SegmentPool* pool = s->pool_;
        pool->give_back(s);
        pool->release();
    }

    void push(Segment* s) {
        std::uint64_t top = free_top_.load();
        do {
            s->free_next_.store(unpack(top));
        } while (!free_top_.compare_exchange_weak(top, pack(s, (top >> 48) + 1)));
    }

    Segment* pop() {
        std::uint64_t top = free_top_.load();
        for (;;) {
            Segment* s = unpack(top);
            if (s == nullptr) return nullptr;
            Segment* n = s->free_next_.load();
            if (free_top_.compare_exchange_weak(top, pack(n, (top >> 48) + 1))) return s;
        }
    }

    const std::uint32_t segment_size_;
    std::atomic<std::uint64_t> free_top_{0};
    std::atomic<std::uint32_t> refs_{1};
    std::atomic<std::size_t> created_{0};
};

// Doubly-linked list of segments consumed through two iterators. Segments whose
// cells are all cancelled and that no iterator references are unlinked in
// constant time; segments both iterators have passed are recycled once all
// their cells are resolved.
class SegmentList {
public:
    static constexpr int kIterators = 2;

    struct Iterator {
        detail::Atomic<std::uint64_t> index{0};
        detail::Atomic<Segment*> segment{nullptr};
    };

    struct Step {
        bool found;
        Segment* segment;
        std::uint64_t claimed;  // index taken from the iterator
        std::uint64_t index;    // cell to process: claimed, or the first cell of segment
    };

    explicit SegmentList(std::uint32_t segment_size, bool track_resolution = true)
        : size_(segment_size), track_resolution_(track_resolution), pool_(new SegmentPool(segment_size)) {
        CQS_ASSERT(segment_size >= 1 && segment_size <= Segment::kCancelledMask);
        Segment* first = pool_->acquire(0, nullptr, kIterators * Segment::kRefUnit);
        alloc_head_.store(first);
        for (auto& it : iterators_) it.segment.unchecked().store(first);
    }

    ~SegmentList() {
        Segment* s = alloc_head_.load();
        while (s != nullptr) {
            Segment* n = s->alloc_next_.load();
            pool_->give_back(s);
            s = n;
        }
        pool_->release();
    }

    SegmentList(const SegmentList&) = delete;
    SegmentList& operator=(const SegmentList&) = delete;

    std::uint32_t segment_size() const noexcept { return size_; }
    Iterator& iterator(int k) noexcept { return iterators_[k]; }
    const Iterator& iterator(int k) const noexcept { return iterators_[k]; }

    Step step(Iterator& it) {
        Segment* start = it.segment.load();
        std::uint64_t i = it.index.fetch_add(1);
        std::uint64_t id = i / size_;
        Segment* s = find_and_move_forward(it, start, id);
        if (s->id() == id) return {true, s, i, i};
        return {false, s, i, s->id() * size_};
    }

    Segment* find_and_move_forward(Iterator& it, Segment* start, std::uint64_t id) {
        for (;;) {
            Segment* s = find_segment(start, id);
            if (move_forward(it, s)) return s;
        }
    }

    Segment* find_segment(Segment* start, std::uint64_t id) {
        Segment* cur = start;
        while (cur->id() < id || cur->removed()) {
            Segment* next = cur->next_.load();
            if (next == nullptr) {
                Segment* fresh = pool_->acquire(cur->id() + 1, cur, 0);
                Segment* expected = nullptr;
                if (cur->next_.compare_exchange(expected, fresh)) {
                    cur->alloc_next_.store(fresh);
                    if (cur->removed()) remove(cur);
                    next = fresh;
                } else {
                    pool_->give_back(fresh);
                    next = expected;
                }
            }
            cur = next;
        }
        return cur;
    }

    bool move_forward(Iterator& it, Segment* to) {
        for (;;) {
            Segment* cur = it.segment.load();
            if (cur->id() >= to->id()) return true;
            if (!to->try_inc_pointers()) return false;
            if (it.segment.cas(cur, to)) {
                if (cur->dec_pointers()) remove(cur);
                reclaim();
                return true;
            }
            if (to->dec_pointers()) remove(to);
        }
    }

    void on_cancelled_cell(Segment* s) {
        std::uint32_t p = s->packed_.fetch_add(1) + 1;
        if (s->is_removed(p)) remove(s);
    }

    void remove(Segment* s) {
        for (;;) {
            if (s->next_.load() == nullptr) return;
            Segment* left = alive_left(s);
            Segment* right = alive_right(s);
            right->prev_.store(left);
            if (left != nullptr) left->next_.store(right);
            if (right->removed() && right->next_.load() != nullptr) continue;
            if (left != nullptr && left->removed()) continue;
            return;
        }
    }

    void clean_prev(Segment* s) { s->prev_.store(nullptr); }

    // Diagnostics below read without schedule points; call them quiescently.

    std::size_t reachable_segments() const {
        std::unordered_set<const Segment*> seen;
        for (const auto& it : iterators_) {
            for (const Segment* s = it.segment.unchecked().load(); s != nullptr;
                 s = s->next_.unchecked().load()) {
                if (!seen.insert(s).second) break;
            }
        }
        return seen.size();
    }

    std::size_t allocated_segments() const {
        std::size_t n = 0;
        for (const Segment* s = alloc_head_.load(); s != nullptr; s = s->alloc_next_.load()) ++n;
        return n;
    }

    std::uint32_t total_iter_refs() const {
        std::uint32_t n = 0;
        for (const Segment* s = alloc_head_.load(); s != nullptr; s = s->alloc_next_.load()) {
            n += s->iter_refs();
        }
        return n;
    }

    std::size_t segments_created() const noexcept { return pool_->created(); }

    template <class F>
    void for_each_allocated(F&& f) {
        for (Segment* s = alloc_head_.load(); s != nullptr; s = s->alloc_next_.load()) f(*s);
    }

    std::vector<std::uint64_t> reachable_ids(int k) const {
        std::vector<std::uint64_t> ids;
        for (const Segment* s = iterators_[k].segment.unchecked().load(); s != nullptr;
             s = s->next_.unchecked().load()) {
            ids.push_back(s->id());
        }
        return ids;
    }

private:
    // A prev link may point at a recycled segment; such links are treated as
    // absent, which is always a valid value for prev.
    Segment* checked_prev(const Segment* s) const {
        Segment* p = s->prev_.load();
        if (p == nullptr) return nullptr;
        std::uint64_t pid = p->id();
        if (pid >= s->id() || pid < floor_.load(std::memory_order_acquire)) return nullptr;
        return p;
    }

    Segment* alive_left(const Segment* s) const {
        Segment* p = checked_prev(s);
        while (p != nullptr && p->removed()) p = checked_prev(p);
        return p;
    }

    Segment* alive_right(const Segment* s) const {
        Segment* n = s->next_.load();
        while (n->removed()) {
            Segment* nn = n->next_.load();
            if (nn == nullptr) break;
            n = nn;
        }
        return n;
    }

    void reclaim() {
        if (reclaiming_.exchange(true, std::memory_order_acquire)) return;
        std::uint64_t floor = std::numeric_limits<std::uint64_t>::max();
        for (auto& it : iterators_) floor = std::min(floor, it.segment.unchecked().load()->id());
        if (floor > floor_.load()) floor_.store(floor);
        for (;;) {
            Segment* h = alloc_head_.load();
            if (h->id() >= floor) break;
            if (track_resolution_ && h->resolved_.load() < size_) break;
            Segment* n = h->alloc_next_.load();
            if (n == nullptr) break;
            alloc_head_.store(n);
            pool_->retire(h);
        }
        reclaiming_.store(false, std::memory_order_release);
    }

    const std::uint32_t size_;
    const bool track_resolution_;
    SegmentPool* pool_;
    Iterator iterators_[kIterators];
    std::atomic<Segment*> alloc_head_{nullptr};
    std::atomic<std::uint64_t> floor_{0};
    std::atomic<bool> reclaiming_{false};
};

CQS_END_NAMESPACE
