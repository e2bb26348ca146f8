#include "cqsync/harness/oracle.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cqsync/cqsync.hpp"

namespace cqs::check {
namespace {

enum class Kind { lock, barrier, latch, pool_queue, pool_stack, raw };

Kind kind_of(const OracleConfig& c) {
    if (c.primitive == "mutex" || c.primitive == "semaphore") return Kind::lock;
    if (c.primitive == "barrier") return Kind::barrier;
    if (c.primitive == "latch") return Kind::latch;
    if (c.primitive == "pool-queue") return Kind::pool_queue;
    if (c.primitive == "pool-stack") return Kind::pool_stack;
    if (c.primitive == "cqs") return Kind::raw;
    throw std::invalid_argument("no sequential model for " + c.primitive);
}

std::int64_t permits_of(const OracleConfig& c) { return c.primitive == "mutex" ? 1 : c.param; }

// The reference: plain sequential bookkeeping with FIFO waiter queues.
class Reference {
public:
    explicit Reference(const OracleConfig& c)
        : kind_(kind_of(c)), sync_(c.resume_mode == "sync"), counter_(permits_of(c)) {}

    std::vector<SeqOp> enabled() const {
        std::vector<SeqOp> ops;
        switch (kind_) {
            case Kind::lock:
                ops.push_back(SeqOp::acquire);
                if (held_ > 0) ops.push_back(SeqOp::release);
                if (sync_) ops.push_back(SeqOp::try_acquire);
                break;
            case Kind::barrier:
                if (counter_ > 0) ops.push_back(SeqOp::arrive);
                break;
            case Kind::latch:
                ops.push_back(SeqOp::count_down);
                ops.push_back(SeqOp::await);
                break;
            case Kind::pool_queue:
            case Kind::pool_stack:
                ops.push_back(SeqOp::put);
                ops.push_back(SeqOp::take);
                break;
            case Kind::raw:
                ops.push_back(SeqOp::suspend);
                ops.push_back(SeqOp::resume);
                break;
        }
        std::size_t pending = std::count(futures_.begin(), futures_.end(), kPending);
        if (pending >= 1) ops.push_back(SeqOp::cancel_oldest);
        if (pending >= 2) ops.push_back(SeqOp::cancel_newest);
        return ops;
    }

    // Index of the future a cancel operation addresses.
    std::size_t target(SeqOp op) const {
        if (op == SeqOp::cancel_oldest) {
            return static_cast<std::size_t>(std::find(futures_.begin(), futures_.end(), kPending) - futures_.begin());
        }
        auto it = std::find(futures_.rbegin(), futures_.rend(), kPending);
        return static_cast<std::size_t>(futures_.rend() - it - 1);
    }

    std::int64_t apply(SeqOp op) {
        switch (op) {
            case SeqOp::acquire:
                if (counter_ > 0) {
                    --counter_;
                    ++held_;
                    return add(0);
                }
                return wait();
            case SeqOp::release:
                --held_;
                if (!waiters_.empty()) {
                    complete_front(0);
                    ++held_;
                } else {
                    ++counter_;
                }
                return 0;
            case SeqOp::try_acquire:
                if (counter_ > 0) {
                    --counter_;
                    ++held_;
                    return 1;
                }
                return 0;
            case SeqOp::arrive:
                if (--counter_ > 0) return wait();
                while (!waiters_.empty()) complete_front(0);
                return add(0);
            case SeqOp::count_down:
                if (--counter_ == 0) {
                    while (!waiters_.empty()) complete_front(0);
                }
                return 0;
            case SeqOp::await:
                if (counter_ <= 0) return add(0);
                return wait();
            case SeqOp::put: {
                std::int64_t v = next_value_++;
                if (!waiters_.empty()) {
                    complete_front(v);
                } else {
                    elements_.push_back(v);
                }
                return 0;
            }
            case SeqOp::take:
                if (!elements_.empty()) {
                    std::int64_t v;
                    if (kind_ == Kind::pool_queue) {
                        v = elements_.front();
                        elements_.pop_front();
                    } else {
                        v = elements_.back();
                        elements_.pop_back();
                    }
                    return add(v);
                }
                return wait();
            case SeqOp::suspend: {
                Cell& cell = cell_at(suspend_idx_++);
                if (cell.kind == Cell::value) return add(cell.v);
                if (cell.kind == Cell::broken) return add(kNoFuture);
                cell = {Cell::waiter, static_cast<std::int64_t>(futures_.size())};
                return add(kPending);
            }
            case SeqOp::resume: {
                std::int64_t v = next_value_++;
                Cell& cell = cell_at(resume_idx_++);
                if (cell.kind == Cell::waiter) {
                    auto& f = futures_[static_cast<std::size_t>(cell.v)];
                    if (f != kPending) return 0;
                    f = v;
                    return 1;
                }
                if (sync_) {
                    cell.kind = Cell::broken;
                    return 0;
                }
                cell = {Cell::value, v};
                return 1;
            }
            case SeqOp::cancel_oldest:
            case SeqOp::cancel_newest: {
                std::size_t id = target(op);
                if (kind_ == Kind::barrier) return 0;
                futures_[id] = kCancelled;
                auto w = std::find(waiters_.begin(), waiters_.end(), id);
                if (w != waiters_.end()) waiters_.erase(w);
                return 1;
            }
        }
        return 0;
    }

    const std::vector<std::int64_t>& futures() const noexcept { return futures_; }

private:
    struct Cell {
        enum { empty, value, waiter, broken } kind = empty;
        std::int64_t v = 0;
    };

    std::int64_t add(std::int64_t status) {
        futures_.push_back(status);
        return static_cast<std::int64_t>(futures_.size() - 1);
    }
    std::int64_t wait() {
        if (kind_ != Kind::raw) waiters_.push_back(futures_.size());
        return add(kPending);
    }
    void complete_front(std::int64_t v) {
        futures_[waiters_.front()] = v;
        waiters_.pop_front();
    }
    Cell& cell_at(std::size_t i) {
        if (cells_.size() <= i) cells_.resize(i + 1);
        return cells_[i];
    }

    Kind kind_;
    bool sync_;
    std::int64_t counter_;
    std::int64_t held_ = 0;
    std::int64_t next_value_ = 0;
    std::deque<std::size_t> waiters_;
    std::deque<std::int64_t> elements_;
    std::vector<Cell> cells_;  // raw queue only; waiters hold their future index
    std::size_t suspend_idx_ = 0;
    std::size_t resume_idx_ = 0;
    std::vector<std::int64_t> futures_;
};

// The real primitive under test, driven with the same operations.
class Subject {
public:
    explicit Subject(const OracleConfig& c) : kind_(kind_of(c)) {
        PrimitiveOptions o;
        o.resume_mode = c.resume_mode == "sync" ? ResumeMode::sync : ResumeMode::async;
        o.cancellation_mode = c.cancellation_mode == "simple" ? CancellationMode::simple : CancellationMode::smart;
        o.segment_size = c.segment_size;
        o.max_spin_cycles = 4;
        PoolOptions po;
        po.segment_size = c.segment_size;
        switch (kind_) {
            case Kind::lock: sem_ = std::make_unique<Semaphore>(permits_of(c), o); break;
            case Kind::barrier: barrier_ = std::make_unique<Barrier>(c.param, c.segment_size); break;
            case Kind::latch: latch_ = std::make_unique<CountDownLatch>(c.param, c.segment_size); break;
            case Kind::pool_queue: queue_ = std::make_unique<QueuePool<std::int64_t>>(po); break;
            case Kind::pool_stack: stack_ = std::make_unique<StackPool<std::int64_t>>(po); break;
            case Kind::raw: {
                Cqs<std::int64_t>::Options q;
                q.resume_mode = o.resume_mode;
                q.cancellation_mode = CancellationMode::simple;
                q.segment_size = c.segment_size;
                q.max_spin_cycles = 4;
                raw_ = std::make_unique<Cqs<std::int64_t>>(q);
                break;
            }
        }
    }

    ~Subject() {
        units_.clear();
        values_.clear();
    }

    std::int64_t apply(SeqOp op, std::size_t target) {
        switch (op) {
            case SeqOp::acquire: return add(sem_->acquire());
            case SeqOp::release: sem_->release(); return 0;
            case SeqOp::try_acquire: return sem_->try_acquire() ? 1 : 0;
            case SeqOp::arrive: return add(barrier_->arrive());
            case SeqOp::count_down: latch_->count_down(); return 0;
            case SeqOp::await: return add(latch_->await());
            case SeqOp::put:
                if (queue_) {
                    queue_->put(next_value_++);
                } else {
                    stack_->put(next_value_++);
                }
                return 0;
            case SeqOp::take: return add(queue_ ? queue_->take() : stack_->take());
            case SeqOp::suspend: {
                auto f = raw_->suspend();
                if (!f) {
                    slots_.push_back({Slot::none, 0});
                    return static_cast<std::int64_t>(slots_.size() - 1);
                }
                return add(std::move(*f));
            }
            case SeqOp::resume: return raw_->resume(next_value_++) ? 1 : 0;
            case SeqOp::cancel_oldest:
            case SeqOp::cancel_newest: {
                const Slot& s = slots_.at(target);
                if (s.kind == Slot::unit) return units_[s.index].cancel() ? 1 : 0;
                if (s.kind == Slot::value) return values_[s.index].cancel() ? 1 : 0;
                return 0;
            }
        }
        return 0;
    }

    std::vector<std::int64_t> futures() const {
        std::vector<std::int64_t> r;
        r.reserve(slots_.size());
        for (const Slot& s : slots_) {
            if (s.kind == Slot::none) {
                r.push_back(kNoFuture);
            } else if (s.kind == Slot::unit) {
                r.push_back(status(units_[s.index].get(), [](Unit) { return std::int64_t{0}; }));
            } else {
                r.push_back(status(values_[s.index].get(), [](std::int64_t v) { return v; }));
            }
        }
        return r;
    }

private:
    struct Slot {
        enum { none, unit, value } kind;
        std::size_t index;
    };

    template <class T, class F>
    static std::int64_t status(const Outcome<T>& o, F value) {
        if (o.completed()) return value(o.value());
        return o.cancelled() ? kCancelled : kPending;
    }

    std::int64_t add(Future<Unit> f) {
        slots_.push_back({Slot::unit, units_.size()});
        units_.push_back(std::move(f));
        return static_cast<std::int64_t>(slots_.size() - 1);
    }
    std::int64_t add(Future<std::int64_t> f) {
        slots_.push_back({Slot::value, values_.size()});
        values_.push_back(std::move(f));
        return static_cast<std::int64_t>(slots_.size() - 1);
    }

    Kind kind_;
    std::int64_t next_value_ = 0;
    std::unique_ptr<Semaphore> sem_;
    std::unique_ptr<Barrier> barrier_;
    std::unique_ptr<CountDownLatch> latch_;
    std::unique_ptr<QueuePool<std::int64_t>> queue_;
    std::unique_ptr<StackPool<std::int64_t>> stack_;
    std::unique_ptr<Cqs<std::int64_t>> raw_;
    std::vector<Slot> slots_;
    std::vector<Future<Unit>> units_;
    std::vector<Future<std::int64_t>> values_;
};

std::string format_ops(const std::vector<SeqOp>& trace, std::size_t upto) {
    std::string r;
    for (std::size_t i = 0; i <= upto && i < trace.size(); ++i) r += (i ? "," : "") + std::string(to_string(trace[i]));
    return r;
}

std::string format_statuses(const std::vector<std::int64_t>& v) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << " ";
        if (v[i] == kPending) {
            os << "pending";
        } else if (v[i] == kCancelled) {
            os << "cancelled";
        } else if (v[i] == kNoFuture) {
            os << "failed";
        } else {
            os << v[i];
        }
    }
    os << "]";
    return os.str();
}

void enumerate(const OracleConfig& c, const Reference& ref, std::vector<SeqOp>& trace, int max_len,
               OracleReport& report) {
    if (!report.passed) return;
    std::vector<SeqOp> ops = static_cast<int>(trace.size()) < max_len ? ref.enabled() : std::vector<SeqOp>{};
    if (ops.empty()) {
        ++report.traces;
        report.steps += trace.size();
        TraceCheck r = check_trace(c, trace);
        if (!r.matched) {
            report.passed = false;
            report.mismatch = r.mismatch;
            report.failing_trace = trace;
        }
        return;
    }
    for (SeqOp op : ops) {
        Reference next = ref;
        next.apply(op);
        trace.push_back(op);
        enumerate(c, next, trace, max_len, report);
        trace.pop_back();
    }
}

}  // namespace

const char* to_string(SeqOp op) {
    switch (op) {
        case SeqOp::acquire: return "acquire";
        case SeqOp::release: return "release";
        case SeqOp::try_acquire: return "try-acquire";
        case SeqOp::arrive: return "arrive";
        case SeqOp::count_down: return "count-down";
        case SeqOp::await: return "await";
        case SeqOp::put: return "put";
        case SeqOp::take: return "take";
        case SeqOp::suspend: return "suspend";
        case SeqOp::resume: return "resume";
        case SeqOp::cancel_oldest: return "cancel-oldest";
        case SeqOp::cancel_newest: return "cancel-newest";
    }
    return "?";
}

std::string describe(const OracleConfig& c) {
    std::ostringstream os;
    os << c.primitive << "[" << c.resume_mode << "/" << c.cancellation_mode << " param=" << c.param
       << " segm=" << c.segment_size << "]";
    return os.str();
}

TraceCheck check_trace(const OracleConfig& c, const std::vector<SeqOp>& trace) {
    Reference ref(c);
    Subject sub(c);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        SeqOp op = trace[i];
        auto enabled = ref.enabled();
        if (std::find(enabled.begin(), enabled.end(), op) == enabled.end()) {
            return {false, "operation " + std::string(to_string(op)) + " is not enabled after " +
                               (i ? format_ops(trace, i - 1) : std::string("the start"))};
        }
        std::size_t target = (op == SeqOp::cancel_oldest || op == SeqOp::cancel_newest) ? ref.target(op) : 0;
        std::int64_t expected = ref.apply(op);
        std::int64_t actual = sub.apply(op, target);
        if (expected != actual) {
            std::ostringstream os;
            os << "after " << format_ops(trace, i) << ": result " << actual << ", reference " << expected;
            return {false, os.str()};
        }
        auto got = sub.futures();
        if (got != ref.futures()) {
            return {false, "after " + format_ops(trace, i) + ": futures " + format_statuses(got) + ", reference " +
                               format_statuses(ref.futures())};
        }
    }
    return {};
}

OracleReport check_all_traces(const OracleConfig& c, int max_len) {
    OracleReport report;
    std::vector<SeqOp> trace;
    enumerate(c, Reference(c), trace, max_len, report);
    return report;
}

std::vector<OracleConfig> standard_oracle_configs() {
    std::vector<OracleConfig> cs;
    auto add = [&](std::string p, std::string resume, std::string cancel, std::int64_t param, std::uint32_t segm) {
        cs.push_back({std::move(p), std::move(resume), std::move(cancel), param, segm});
    };
    add("mutex", "async", "smart", 1, 2);
    add("mutex", "async", "simple", 1, 2);
    add("mutex", "sync", "smart", 1, 2);
    add("mutex", "sync", "simple", 1, 2);
    add("semaphore", "async", "smart", 2, 2);
    add("semaphore", "sync", "smart", 2, 2);
    add("barrier", "async", "simple", 4, 2);
    add("latch", "async", "smart", 2, 2);
    add("pool-queue", "async", "smart", 0, 2);
    add("pool-stack", "async", "smart", 0, 2);
    add("cqs", "async", "simple", 0, 2);
    add("cqs", "sync", "simple", 0, 2);
    return cs;
}

}  // namespace cqs::check
