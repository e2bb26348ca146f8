#include "cqsync/harness/explorer.hpp"

#include <ucontext.h>

#include <exception>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"

namespace cqs::check {
namespace {

using cqs::runtime::PointKind;

struct RunAborted {};
struct CheckFailure {
    std::string message;
};

[[noreturn]] void throw_check_failure(const char* expr, const char* file, int line) {
    std::ostringstream os;
    os << "internal check failed: " << expr << " (" << file << ":" << line << ")";
    throw CheckFailure{os.str()};
}

enum class Policy { dfs, replay, random };

struct Decision {
    std::vector<int> options;
    std::vector<int> costs;
    int chosen = 0;
};

struct Fiber {
    ucontext_t ctx{};
    std::unique_ptr<char[]> stack;
    std::function<void()> body;
    bool started = false;
    bool done = false;
    bool spinning = false;
    std::uint64_t spin_mark = 0;
    // Writes seen when the current spin iteration did its first read.
    std::uint64_t iteration_mark = 0;
    bool new_iteration = true;
    const void* callback_cell = nullptr;
};

class Scheduler;
thread_local Scheduler* tls_scheduler = nullptr;

class Scheduler final : public cqs::runtime::ScheduleHook {
public:
    explicit Scheduler(const ExploreOptions& o) : opt_(o) {}

    struct Outcome {
        bool failed = false;
        std::string failure;
        Trace trace;
        std::vector<Decision> path;
    };

    Outcome run(const ProgramFactory& factory, int bound, Policy policy, const std::vector<int>& forced,
                std::uint64_t seed) {
        bound_ = bound;
        policy_ = policy;
        forced_ = &forced;
        rng_.seed(seed);
        path_.clear();
        trace_.clear();
        failure_.reset();
        aborting_ = false;
        depth_ = 0;
        preemptions_ = 0;
        steps_ = 0;
        writes_ = 0;

        Program program = factory();
        const std::size_t n = program.threads.size();
        if (fibers_.size() < n) fibers_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            Fiber& f = fibers_[i];
            if (!f.stack) f.stack.reset(new char[opt_.stack_size]);
            f.body = std::move(program.threads[i]);
            f.started = f.done = f.spinning = false;
            f.spin_mark = f.iteration_mark = 0;
            f.new_iteration = true;
            f.callback_cell = nullptr;
            getcontext(&f.ctx);
            f.ctx.uc_stack.ss_sp = f.stack.get();
            f.ctx.uc_stack.ss_size = opt_.stack_size;
            f.ctx.uc_link = &main_ctx_;
            makecontext(&f.ctx, &Scheduler::trampoline, 0);
        }
        count_ = static_cast<int>(n);

        Scheduler* saved_sched = std::exchange(tls_scheduler, this);
        auto* saved_hook = std::exchange(cqs::runtime::tls_schedule_hook, this);
        auto saved_check = std::exchange(cqs::runtime::tls_check_handler, &throw_check_failure);
        const void* saved_cell = std::exchange(cqs::runtime::tls_callback_cell, nullptr);

        if (count_ > 0) {
            current_ = -1;
            int first = decide(-1, PointKind::read);
            current_ = first;
            fibers_[first].started = true;
            swapcontext(&main_ctx_, &fibers_[first].ctx);
        }
        current_ = -1;
        cqs::runtime::tls_schedule_hook = saved_hook;
        cqs::runtime::tls_callback_cell = saved_cell;

        if (!aborting_ && program.finish) {
            try {
                program.finish();
            } catch (const CheckFailure& e) {
                record_failure(e.message);
            } catch (const std::exception& e) {
                record_failure(std::string("exception in final check: ") + e.what());
            }
        }
        for (std::size_t i = 0; i < n; ++i) fibers_[i].body = nullptr;
        program = Program{};
        cqs::runtime::tls_check_handler = saved_check;
        tls_scheduler = saved_sched;

        Outcome out;
        out.failed = failure_.has_value();
        if (out.failed) out.failure = *failure_;
        out.trace = std::move(trace_);
        out.path = std::move(path_);
        return out;
    }

    void point(PointKind kind, const char* what) override {
        if (aborting_) throw RunAborted{};
        Fiber& f = fibers_[current_];
        if (++steps_ > opt_.max_steps) abort_run("step limit exceeded (livelock?)");
        if (kind == PointKind::write) {
            f.spinning = false;
        } else if (kind == PointKind::spin) {
            f.spinning = true;
            f.spin_mark = f.new_iteration ? writes_ : f.iteration_mark;
            f.new_iteration = true;
            if (all_waiting()) abort_run("deadlock: every remaining thread waits and nothing changes");
        }
        int next = decide(current_, kind);
        if (next != current_) switch_to(next);
        if (aborting_) throw RunAborted{};
        if (kind == PointKind::write) ++writes_;
        if (kind != PointKind::spin && f.new_iteration) {
            f.iteration_mark = writes_;
            f.new_iteration = false;
        }
        trace_.push_back({current_, what});
    }

    void record_failure(const std::string& msg) {
        if (!failure_) failure_ = msg;
    }

    void note(const std::string& label) { trace_.push_back({current_, label}); }
    int current() const noexcept { return current_; }

private:
    static void trampoline() {
        Scheduler* s = tls_scheduler;
        const int id = s->current_;
        try {
            s->fibers_[id].body();
        } catch (const RunAborted&) {
        } catch (const CheckFailure& e) {
            s->record_failure(e.message);
            s->aborting_ = true;
        } catch (const std::exception& e) {
            s->record_failure(std::string("exception: ") + e.what());
            s->aborting_ = true;
        } catch (...) {
            s->record_failure("unknown exception");
            s->aborting_ = true;
        }
        s->fibers_[id].done = true;
        s->exit_fiber(id);
    }

    [[noreturn]] void exit_fiber(int id) {
        int next = -1;
        if (!aborting_ && any_alive() && all_waiting()) {
            record_failure("deadlock: every remaining thread waits and nothing changes");
            aborting_ = true;
        }
        if (aborting_) {
            for (int i = 0; i < count_; ++i) {
                if (fibers_[i].done) continue;
                if (!fibers_[i].started) {
                    fibers_[i].done = true;
                    continue;
                }
                next = i;
                break;
            }
        } else if (any_alive()) {
            next = decide(id, PointKind::read);
        }
        if (next < 0) {
            setcontext(&main_ctx_);
        } else {
            current_ = next;
            fibers_[next].started = true;
            cqs::runtime::tls_callback_cell = fibers_[next].callback_cell;
            setcontext(&fibers_[next].ctx);
        }
        std::terminate();
    }

    void switch_to(int next) {
        const int prev = current_;
        current_ = next;
        fibers_[next].started = true;
        fibers_[prev].callback_cell = std::exchange(cqs::runtime::tls_callback_cell, fibers_[next].callback_cell);
        swapcontext(&fibers_[prev].ctx, &fibers_[next].ctx);
        current_ = prev;
    }

    [[noreturn]] void abort_run(const std::string& why) {
        record_failure(why);
        aborting_ = true;
        throw RunAborted{};
    }

    bool any_alive() const {
        for (int i = 0; i < count_; ++i) {
            if (!fibers_[i].done) return true;
        }
        return false;
    }

    // A spinner that has seen every write so far would only spin again.
    bool blocked(int t) const {
        const Fiber& f = fibers_[t];
        return f.spinning && f.spin_mark == writes_;
    }

    bool all_waiting() const {
        for (int i = 0; i < count_; ++i) {
            const Fiber& f = fibers_[i];
            if (f.done) continue;
            if (!f.spinning || f.spin_mark != writes_) return false;
        }
        return true;
    }

    int decide(int cur, PointKind kind) {
        Decision d;
        const bool cur_alive = cur >= 0 && !fibers_[cur].done;
        if (cur_alive && kind != PointKind::spin) {
            d.options.push_back(cur);
            d.costs.push_back(0);
        }
        const int cost = (cur_alive && kind != PointKind::spin) ? 1 : 0;
        for (int k = 1; k <= count_; ++k) {
            int t = cur < 0 ? k - 1 : (cur + k) % count_;
            if (t == cur || fibers_[t].done || blocked(t)) continue;
            if (bound_ >= 0 && preemptions_ + cost > bound_) continue;
            d.options.push_back(t);
            d.costs.push_back(cost);
        }
        if (d.options.empty()) {
            d.options.push_back(cur);
            d.costs.push_back(0);
        }

        const std::size_t depth = depth_++;
        int idx = 0;
        switch (policy_) {
            case Policy::dfs:
                if (depth < forced_->size()) idx = (*forced_)[depth];
                break;
            case Policy::replay:
                if (depth < forced_->size()) {
                    for (std::size_t i = 0; i < d.options.size(); ++i) {
                        if (d.options[i] == (*forced_)[depth]) idx = static_cast<int>(i);
                    }
                }
                break;
            case Policy::random:
                idx = static_cast<int>(rng_() % d.options.size());
                break;
        }
        if (idx >= static_cast<int>(d.options.size())) idx = 0;
        d.chosen = idx;
        preemptions_ += d.costs[idx];
        const int chosen = d.options[idx];
        path_.push_back(std::move(d));
        return chosen;
    }

    ExploreOptions opt_;
    std::vector<Fiber> fibers_;
    ucontext_t main_ctx_{};
    int count_ = 0;
    int current_ = -1;
    int bound_ = -1;
    Policy policy_ = Policy::dfs;
    const std::vector<int>* forced_ = nullptr;
    std::mt19937_64 rng_;
    std::vector<Decision> path_;
    Trace trace_;
    std::optional<std::string> failure_;
    bool aborting_ = false;
    std::size_t depth_ = 0;
    int preemptions_ = 0;
    std::uint64_t steps_ = 0;
    std::uint64_t writes_ = 0;
};

std::vector<int> schedule_of(const std::vector<Decision>& path) {
    std::vector<int> s;
    s.reserve(path.size());
    for (const Decision& d : path) s.push_back(d.options[d.chosen]);
    return s;
}

void fill_failure(Verdict& v, Scheduler::Outcome& out) {
    v.passed = false;
    v.failure = out.failure;
    v.counterexample = std::move(out.trace);
    v.schedule = schedule_of(out.path);
}

}  // namespace

std::string format_trace(const Trace& trace) {
    std::ostringstream os;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        os << "  " << i << ": T" << trace[i].thread << " " << trace[i].what << "\n";
    }
    return os.str();
}

Verdict explore(const ProgramFactory& factory, const ExploreOptions& options) {
    Scheduler sched(options);
    Verdict v;
    const int top = options.preemption_bound;
    const int start = (options.iterative && top >= 0) ? 0 : top;
    for (int bound = start; bound <= top || (top < 0 && bound == start); ++bound) {
        v.bound = bound;
        std::vector<int> forced;
        for (;;) {
            Scheduler::Outcome out = sched.run(factory, bound, Policy::dfs, forced, 0);
            ++v.runs;
            if (out.path.size() > v.max_depth) v.max_depth = out.path.size();
            if (out.failed) {
                fill_failure(v, out);
                return v;
            }
            int i = static_cast<int>(out.path.size()) - 1;
            while (i >= 0 && out.path[i].chosen + 1 >= static_cast<int>(out.path[i].options.size())) --i;
            if (i < 0) break;
            forced.resize(i + 1);
            for (int k = 0; k < i; ++k) forced[k] = out.path[k].chosen;
            forced[i] = out.path[i].chosen + 1;
            if (v.runs >= options.max_runs) {
                v.complete = false;
                return v;
            }
        }
        if (top < 0) break;
    }
    return v;
}

Verdict explore_random(const ProgramFactory& factory, std::uint64_t runs, std::uint64_t seed,
                       const ExploreOptions& options) {
    Scheduler sched(options);
    Verdict v;
    v.bound = -1;
    const std::vector<int> none;
    for (std::uint64_t i = 0; i < runs; ++i) {
        Scheduler::Outcome out = sched.run(factory, -1, Policy::random, none, seed + i);
        ++v.runs;
        if (out.path.size() > v.max_depth) v.max_depth = out.path.size();
        if (out.failed) {
            fill_failure(v, out);
            return v;
        }
    }
    return v;
}

Verdict replay(const ProgramFactory& factory, const std::vector<int>& schedule, const ExploreOptions& options) {
    Scheduler sched(options);
    Verdict v;
    v.bound = -1;
    Scheduler::Outcome out = sched.run(factory, -1, Policy::replay, schedule, 0);
    v.runs = 1;
    v.max_depth = out.path.size();
    if (out.failed) {
        fill_failure(v, out);
    } else {
        v.counterexample = std::move(out.trace);
        v.schedule = schedule_of(out.path);
    }
    return v;
}

void fail(const std::string& message) {
    if (tls_scheduler != nullptr) {
        tls_scheduler->record_failure(message);
    } else {
        throw std::logic_error("cqs::check::fail outside an exploration: " + message);
    }
}

void require(bool condition, const char* message) {
    if (!condition) fail(message);
}

void note(const std::string& label) {
    if (tls_scheduler != nullptr && tls_scheduler->current() >= 0) tls_scheduler->note(label);
}

int current_thread() { return tls_scheduler != nullptr ? tls_scheduler->current() : -1; }

bool exploring() { return tls_scheduler != nullptr; }

}  // namespace cqs::check
