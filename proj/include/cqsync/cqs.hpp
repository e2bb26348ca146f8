#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "cqsync/atomic.hpp"
#include "cqsync/cell.hpp"
#include "cqsync/config.hpp"
#include "cqsync/ebr.hpp"
#include "cqsync/future.hpp"
#include "cqsync/segment_list.hpp"

CQS_BEGIN_NAMESPACE

enum class ResumeMode : std::uint8_t { async, sync };
enum class CancellationMode : std::uint8_t { simple, smart };

inline const char* to_string(ResumeMode m) noexcept { return m == ResumeMode::async ? "async" : "sync"; }
inline const char* to_string(CancellationMode m) noexcept {
    return m == CancellationMode::simple ? "simple" : "smart";
}

// Event counters, maintained only when Options::collect_stats is set.
struct CqsStats {
    std::atomic<std::uint64_t> suspends{0};
    std::atomic<std::uint64_t> suspend_failed{0};
    std::atomic<std::uint64_t> resume_true{0};
    std::atomic<std::uint64_t> resume_false{0};
    std::atomic<std::uint64_t> completed_requests{0};
    std::atomic<std::uint64_t> values_taken{0};
    std::atomic<std::uint64_t> refused_completions{0};
    std::atomic<std::uint64_t> delegations{0};
    std::atomic<std::uint64_t> cancelled_cells{0};
    std::atomic<std::uint64_t> refused_cells{0};
    std::atomic<std::uint64_t> broken_cells{0};

    // Every successful top-level resume must account for one delivery.
    bool balanced() const noexcept {
        return resume_true.load() == completed_requests.load() + values_taken.load() + refused_completions.load();
    }
};

template <class T>
class Cqs {
public:
    struct Options {
        ResumeMode resume_mode = ResumeMode::async;
        CancellationMode cancellation_mode = CancellationMode::simple;
        std::uint32_t segment_size = 16;
        std::uint32_t max_spin_cycles = 100;
        bool cancellable = true;
        bool collect_stats = false;
        // Smart mode only. Both must be non-blocking and must not throw.
        std::function<bool()> on_cancellation;
        std::function<void(T)> complete_refused_resume;
    };

    explicit Cqs(Options options) : opt_(std::move(options)), list_(opt_.segment_size) {
        CQS_ASSERT(opt_.cancellation_mode == CancellationMode::simple ||
                   (opt_.on_cancellation && opt_.complete_refused_resume));
    }

    ~Cqs() {
        list_.for_each_allocated([](Segment& s) {
            for (std::uint32_t i = 0; i < s.size(); ++i) {
                std::uintptr_t w = s.cell(i).unchecked().load();
                switch (detail::cell_kind(w)) {
                    case CellKind::request: reinterpret_cast<CellRequest*>(w)->release(); break;
                    case CellKind::value: detail::ValueCodec<T>::dispose(w); break;
                    default: break;
                }
            }
        });
    }

    Cqs(const Cqs&) = delete;
    Cqs& operator=(const Cqs&) = delete;

    // Empty result means the cell was broken by a timed-out synchronous resume.
    std::optional<Future<T>> suspend() {
        ebr::Guard guard;
        SegmentList::Step st = list_.step(list_.iterator(kSuspend));
        CQS_ASSERT(st.found);
        Segment* s = st.segment;
        const std::uint32_t off = offset(st.index);
        auto& cell = s->cell(off);
        CQS_ASSERT(&cell != cqs::runtime::tls_callback_cell);

        auto* req = new CellRequest(this, s, off, opt_.cancellable);
        req->add_ref();
        std::uintptr_t cur = detail::kEmptyCell;
        if (cell.compare_exchange(cur, reinterpret_cast<std::uintptr_t>(req))) {
            count(stats_.suspends);
            return Future<T>::adopt(req);
        }
        delete req;
        for (;;) {
            if (cur == detail::kBrokenCell) {
                s->resolve_cell();
                count(stats_.suspend_failed);
                return std::nullopt;
            }
            CQS_ASSERT(detail::cell_kind(cur) == CellKind::value);
            std::uintptr_t w = cur;
            if (cell.compare_exchange(cur, detail::kTakenCell)) {
                s->resolve_cell();
                count(stats_.suspends);
                count(stats_.values_taken);
                return Future<T>::ready(detail::ValueCodec<T>::take(w));
            }
        }
    }

    bool resume(T value) {
        bool ok = resume_impl(value);
        count(ok ? stats_.resume_true : stats_.resume_false);
        return ok;
    }

    const Options& options() const noexcept { return opt_; }
    const CqsStats& stats() const noexcept { return stats_; }
    SegmentList& segments() noexcept { return list_; }
    const SegmentList& segments() const noexcept { return list_; }

    std::uint64_t suspend_index() const { return list_.iterator(kSuspend).index.unchecked().load(); }
    std::uint64_t resume_index() const { return list_.iterator(kResume).index.unchecked().load(); }

    // Quiescent scan of every allocated cell.
    std::size_t count_cells(CellKind kind) {
        std::size_t n = 0;
        list_.for_each_allocated([&](Segment& s) {
            for (std::uint32_t i = 0; i < s.size(); ++i) {
                if (detail::cell_kind(s.cell(i).unchecked().load()) == kind) ++n;
            }
        });
        return n;
    }

    CellKind cell_kind_at(std::uint64_t index) {
        CellKind k = CellKind::empty;
        list_.for_each_allocated([&](Segment& s) {
            if (s.id() == index / opt_.segment_size) k = detail::cell_kind(s.cell(offset(index)).unchecked().load());
        });
        return k;
    }

private:
    static constexpr int kSuspend = 0;
    static constexpr int kResume = 1;

    class CellRequest final : public Request<T> {
    public:
        CellRequest(Cqs* q, Segment* s, std::uint32_t off, bool cancellable)
            : Request<T>(cancellable), q_(q), s_(s), off_(off) {}

    protected:
        void on_cancelled() override { q_->cancellation_handler(s_, off_, this); }

    private:
        Cqs* q_;
        Segment* s_;
        std::uint32_t off_;
    };

    std::uint32_t offset(std::uint64_t index) const noexcept {
        return static_cast<std::uint32_t>(index % opt_.segment_size);
    }
    bool smart() const noexcept { return opt_.cancellation_mode == CancellationMode::smart; }
    bool async() const noexcept { return opt_.resume_mode == ResumeMode::async; }
    void count(std::atomic<std::uint64_t>& c) noexcept {
        if (opt_.collect_stats) c.fetch_add(1, std::memory_order_relaxed);
    }

    bool resume_impl(T& v) {
        using Codec = detail::ValueCodec<T>;
        ebr::Guard guard;
        auto& it = list_.iterator(kResume);
        for (;;) {
            SegmentList::Step st = list_.step(it);
            if (!st.found) {
                if (!smart()) return false;
                it.index.cas(st.claimed + 1, st.index);
                continue;
            }
            Segment* s = st.segment;
            list_.clean_prev(s);
            auto& cell = s->cell(offset(st.index));
            CQS_ASSERT(&cell != cqs::runtime::tls_callback_cell);
            bool skip = false;
            while (!skip) {
                std::uintptr_t cur = cell.load();
                switch (detail::cell_kind(cur)) {
                    case CellKind::empty: {
                        std::uintptr_t w = Codec::encode(std::move(v));
                        if (!cell.cas(detail::kEmptyCell, w)) {
                            v = Codec::take(w);
                            continue;
                        }
                        if (async()) return true;
                        for (std::uint32_t k = 0; k < opt_.max_spin_cycles; ++k) {
                            if (cell.load() == detail::kTakenCell) return true;
                        }
                        if (cell.cas(w, detail::kBrokenCell)) {
                            v = Codec::take(w);
                            count(stats_.broken_cells);
                            return false;
                        }
                        return true;
                    }
                    case CellKind::request: {
                        auto* req = reinterpret_cast<CellRequest*>(cur);
                        if (req->complete(std::move(v))) {
                            std::uintptr_t old = cell.exchange(detail::kResumedCell);
                            detail::check_transition(old, detail::kResumedCell);
                            s->resolve_cell();
                            req->release();
                            count(stats_.completed_requests);
                            return true;
                        }
                        if (!smart()) return false;
                        if (!async()) {
                            detail::spin_hint();
                            continue;
                        }
                        std::uintptr_t w = Codec::encode(std::move(v));
                        if (cell.cas(cur, w)) {
                            req->release();
                            count(stats_.delegations);
                            return true;
                        }
                        v = Codec::take(w);
                        continue;
                    }
                    case CellKind::cancelled:
                        if (!smart()) return false;
                        skip = true;
                        break;
                    case CellKind::refused:
                        refused(std::move(v), &cell);
                        return true;
                    default:
                        CQS_ASSERT(false && "resume found a cell in an impossible state");
                        return false;
                }
            }
        }
    }

    void cancellation_handler(Segment* s, std::uint32_t off, CellRequest* req) {
        ebr::Guard guard;
        auto& cell = s->cell(off);
        const auto self = reinterpret_cast<std::uintptr_t>(req);
        if (!smart()) {
            [[maybe_unused]] std::uintptr_t old = cell.exchange(detail::kCancelledCell);
            CQS_ASSERT(old == self);
            req->release();
            count(stats_.cancelled_cells);
            list_.on_cancelled_cell(s);
            s->resolve_cell();
            return;
        }
        bool deregistered;
        {
            const void* saved = std::exchange(cqs::runtime::tls_callback_cell, &cell);
            deregistered = opt_.on_cancellation();
            cqs::runtime::tls_callback_cell = saved;
        }
        const std::uintptr_t mark = deregistered ? detail::kCancelledCell : detail::kRefusedCell;
        std::uintptr_t old = cell.exchange(mark);
        detail::check_transition(old, mark);
        count(deregistered ? stats_.cancelled_cells : stats_.refused_cells);
        if (old == self) {
            req->release();
            if (deregistered) list_.on_cancelled_cell(s);
            s->resolve_cell();
            return;
        }
        s->resolve_cell();
        T v = detail::ValueCodec<T>::take(old);
        if (deregistered) {
            [[maybe_unused]] bool ok = resume_impl(v);
            CQS_ASSERT(ok);
        } else {
            refused(std::move(v), &cell);
        }
    }

    void refused(T v, const void* cell) {
        count(stats_.refused_completions);
        const void* saved = std::exchange(cqs::runtime::tls_callback_cell, cell);
        opt_.complete_refused_resume(std::move(v));
        cqs::runtime::tls_callback_cell = saved;
    }

    Options opt_;
    CqsStats stats_;
    SegmentList list_;
};

CQS_END_NAMESPACE
