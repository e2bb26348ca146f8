#include "cqsync/harness/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cqsync/cqsync.hpp"
#include "cqsync/harness/fixtures.hpp"

namespace cqs::check {
namespace {

using cqs::detail::spin_hint;

template <class T>
void wait_for(const Future<T>& f) {
    while (f.state() == FutureState::pending) spin_hint();
}

PrimitiveOptions primitive_options(const ScenarioConfig& s) {
    PrimitiveOptions o;
    if (s.resume_mode == "sync") {
        o.resume_mode = ResumeMode::sync;
    } else if (s.resume_mode != "async") {
        throw std::invalid_argument("unknown resume_mode: " + s.resume_mode);
    }
    if (s.cancellation_mode == "simple") {
        o.cancellation_mode = CancellationMode::simple;
    } else if (s.cancellation_mode != "smart") {
        throw std::invalid_argument("unknown cancellation_mode: " + s.cancellation_mode);
    }
    o.segment_size = s.segment_size;
    o.max_spin_cycles = s.max_spin_cycles;
    o.collect_stats = true;
    return o;
}

// At rest every request still stored in a cell is a live waiter.
template <class T>
std::size_t segments_with_waiters(Cqs<T>& q) {
    std::size_t n = 0;
    q.segments().for_each_allocated([&](Segment& s) {
        for (std::uint32_t i = 0; i < s.size(); ++i) {
            if (cqs::detail::cell_kind(s.cell(i).unchecked().load()) == CellKind::request) {
                ++n;
                return;
            }
        }
    });
    return n;
}

template <class T>
void check_queue_quiescent(Cqs<T>& q) {
    require(q.stats().balanced(), "every successful resume delivers exactly once");
    require(q.segments().total_iter_refs() == 2, "only the two iterators pin segments at the end");
    require(q.segments().reachable_segments() <= segments_with_waiters(q) + 3,
            "only segments with live waiters and at most three others stay reachable at the end");
}

class Model {
public:
    virtual ~Model() = default;
    virtual void op(int thread, const std::string& name) = 0;
    virtual void thread_done(int) {}
    virtual void finish() = 0;
};

[[noreturn]] void unknown_op(const std::string& primitive, const std::string& name) {
    throw std::invalid_argument("operation '" + name + "' is not defined for " + primitive);
}

// ---------------------------------------------------------------------------
// Mutex, semaphore and the two broken mutex fixtures.

class Lockish {
public:
    virtual ~Lockish() = default;
    virtual Future<Unit> acquire() = 0;
    virtual void release() = 0;
    virtual bool try_acquire() = 0;
    virtual std::int64_t state() const = 0;
    virtual std::size_t value_cells() = 0;
    virtual Cqs<Unit>* queue() { return nullptr; }
};

class SemaphoreLock final : public Lockish {
public:
    SemaphoreLock(std::int64_t k, PrimitiveOptions o) : sem_(k, o) {}
    Future<Unit> acquire() override { return sem_.acquire(); }
    void release() override { sem_.release(); }
    bool try_acquire() override { return sem_.try_acquire(); }
    std::int64_t state() const override { return sem_.state(); }
    std::size_t value_cells() override { return sem_.cqs().count_cells(CellKind::value); }
    Cqs<Unit>* queue() override { return &sem_.cqs(); }

private:
    Semaphore sem_;
};

class NaiveLock final : public Lockish {
public:
    Future<Unit> acquire() override { return m_.lock(); }
    void release() override { m_.unlock(); }
    bool try_acquire() override { throw std::invalid_argument("the naive mutex has no try-acquire"); }
    std::int64_t state() const override { return m_.state(); }
    std::size_t value_cells() override { return m_.value_cells(); }

private:
    fixtures::NaiveSmartMutex m_;
};

class AsyncTryLock final : public Lockish {
public:
    explicit AsyncTryLock(std::uint32_t segment_size) : m_(segment_size, true) {}
    Future<Unit> acquire() override { return m_.lock(); }
    void release() override { m_.unlock(); }
    bool try_acquire() override { return m_.try_lock(); }
    std::int64_t state() const override { return m_.state(); }
    std::size_t value_cells() override { return m_.cqs().count_cells(CellKind::value); }
    Cqs<Unit>* queue() override { return &m_.cqs(); }

private:
    fixtures::AsyncTryLockMutex m_;
};

class LockModel final : public Model {
public:
    LockModel(const ScenarioConfig& s, std::unique_ptr<Lockish> lock, std::int64_t permits, bool permits_visible)
        : primitive_(s.primitive),
          lock_(std::move(lock)),
          permits_(permits),
          permits_visible_(permits_visible),
          threads_(s.threads.size()) {}

    void op(int t, const std::string& name) override {
        Thread& me = threads_[t];
        if (name == "acquire" || name == "lock") {
            me.phase = Phase::acquiring;
            Future<Unit> f = lock_->acquire();
            wait_for(f);
            require(f.state() == FutureState::completed, "an acquire that was not cancelled completes");
            enter(me);
        } else if (name == "acquire-cancel" || name == "lock-cancel") {
            me.phase = Phase::acquiring;
            Future<Unit> f = lock_->acquire();
            if (f.cancel()) {
                note("cancelled");
                me.phase = me.held > 0 ? Phase::holding : Phase::idle;
                return;
            }
            wait_for(f);
            require(f.state() == FutureState::completed, "an acquire whose cancel failed completes");
            enter(me);
        } else if (name == "try-acquire" || name == "trylock") {
            const bool free_before = occupancy_ < permits_ && others_still_idle(t);
            me.phase = Phase::acquiring;
            if (lock_->try_acquire()) {
                note("acquired");
                enter(me);
            } else {
                note("refused");
                if (free_before && others_still_idle(t)) fail("try-acquire failed although a permit was free");
                me.phase = me.held > 0 ? Phase::holding : Phase::idle;
            }
        } else if (name == "release" || name == "unlock") {
            if (me.held == 0) {
                note("nothing held");
                return;
            }
            --me.held;
            --occupancy_;
            me.phase = Phase::releasing;
            ++releases_in_flight_;
            lock_->release();
            --releases_in_flight_;
            me.phase = me.held > 0 ? Phase::holding : Phase::idle;
            if (permits_visible_ && releases_in_flight_ == 0) {
                require(lock_->value_cells() == 0, "a completed release leaves no permit parked in a cell");
            }
        } else {
            unknown_op(primitive_, name);
        }
    }

    void finish() override {
        for (Thread& th : threads_) {
            while (th.held > 0) {
                --th.held;
                --occupancy_;
                lock_->release();
            }
        }
        require(occupancy_ == 0, "holder accounting returns to zero");
        require(lock_->state() == permits_, "all permits return to the state counter");
        if (Cqs<Unit>* q = lock_->queue()) check_queue_quiescent(*q);
    }

private:
    enum class Phase { idle, acquiring, holding, releasing };
    struct Thread {
        Phase phase = Phase::idle;
        int held = 0;
    };

    void enter(Thread& me) {
        ++me.held;
        ++occupancy_;
        me.phase = Phase::holding;
        require(occupancy_ <= permits_, "no more holders than permits");
        cqs::detail::schedule_point(cqs::detail::PointKind::read, "critical section");
    }

    bool others_still_idle(int t) const {
        for (std::size_t i = 0; i < threads_.size(); ++i) {
            if (static_cast<int>(i) != t && threads_[i].phase != Phase::idle) return false;
        }
        return true;
    }

    std::string primitive_;
    std::unique_ptr<Lockish> lock_;
    std::int64_t permits_;
    bool permits_visible_;
    std::vector<Thread> threads_;
    std::int64_t occupancy_ = 0;
    int releases_in_flight_ = 0;
};

// ---------------------------------------------------------------------------
// Barrier. Arrivals do not block the arriving thread; each thread waits for
// its own arrivals when its program ends.

class BarrierModel final : public Model {
public:
    explicit BarrierModel(const ScenarioConfig& s)
        : barrier_(s.param, s.segment_size, true), waits_(s.threads.size()) {}

    void op(int t, const std::string& name) override {
        if (name != "arrive" && name != "arrive-cancel") unknown_op("barrier", name);
        ++arrivals_started_;
        Future<Unit> f = barrier_.arrive();
        if (name == "arrive-cancel") require(!f.cancel(), "barrier arrivals cannot be cancelled");
        waits_[t].push_back(std::move(f));
        poll();
    }

    void thread_done(int t) override {
        for (const auto& f : waits_[t]) {
            wait_for(f);
            observed(f);
        }
    }

    void finish() override {
        require(barrier_.remaining() == 0, "every party arrived");
        for (const auto& fs : waits_) {
            for (const auto& f : fs) require(f.state() == FutureState::completed, "every arrival completes");
        }
        check_queue_quiescent(barrier_.cqs());
    }

private:
    void poll() {
        for (std::size_t t = 0; t < waits_.size(); ++t) {
            for (std::size_t i = 0; i < waits_[t].size(); ++i) observed(waits_[t][i]);
        }
    }
    void observed(const Future<Unit>& f) {
        if (f.request() != nullptr && f.request()->state() == FutureState::completed) {
            require(arrivals_started_ == barrier_.parties(), "no arrival completes before the last party arrives");
        }
    }

    Barrier barrier_;
    std::vector<std::vector<Future<Unit>>> waits_;
    std::int64_t arrivals_started_ = 0;
};

// ---------------------------------------------------------------------------
// Count-down latch. Awaits do not block; they are checked as they complete and
// once more at the end.

class LatchModel final : public Model {
public:
    explicit LatchModel(const ScenarioConfig& s) : latch_(s.param, s.segment_size, true) {}

    void op(int, const std::string& name) override {
        if (name == "count-down") {
            latch_.count_down();
        } else if (name == "await" || name == "await-cancel") {
            Future<Unit> f = latch_.await();
            bool cancelled = name == "await-cancel" && f.cancel();
            if (cancelled) note("cancelled");
            if (!cancelled) awaits_.push_back(std::move(f));
        } else {
            unknown_op("latch", name);
        }
        for (std::size_t i = 0; i < awaits_.size(); ++i) {
            Request<Unit>* req = awaits_[i].request();
            if (req != nullptr && req->state() == FutureState::completed) {
                require(latch_.count() <= 0, "no await completes while the count is positive");
            }
        }
    }

    void finish() override {
        const bool open = latch_.count() <= 0;
        for (const auto& f : awaits_) {
            if (open) {
                require(f.state() == FutureState::completed, "once the count reaches zero every waiter is resumed");
            } else {
                require(f.state() == FutureState::pending, "no waiter is resumed while the count is positive");
            }
        }
        auto& st = latch_.cqs().stats();
        require(st.resume_false.load() == 0, "latch resumes never fail");
        require(latch_.resumes_issued() == st.resume_true.load(), "latch issues exactly its counted resumes");
        check_queue_quiescent(latch_.cqs());
    }

private:
    CountDownLatch latch_;
    std::vector<Future<Unit>> awaits_;
};

// ---------------------------------------------------------------------------
// Blocking pools. Takes do not block. At the end the pool is drained and every
// element must be accounted for exactly once.

template <class Pool>
class PoolModel final : public Model {
public:
    PoolModel(const ScenarioConfig& s, std::string primitive) : primitive_(std::move(primitive)) {
        PoolOptions o;
        o.segment_size = s.segment_size;
        o.collect_stats = true;
        pool_ = std::make_unique<Pool>(o);
        for (std::int64_t i = 0; i < s.param; ++i) {
            pool_->put(static_cast<int>(i));
            inserted_.insert(static_cast<int>(i));
        }
        next_.resize(s.threads.size(), 0);
    }

    ~PoolModel() override {
        takes_.clear();
        pool_.reset();
    }

    void op(int t, const std::string& name) override {
        if (name == "put") {
            int e = 1000 * (t + 1) + next_[t]++;
            inserted_.insert(e);
            pool_->put(e);
        } else if (name == "take" || name == "take-cancel") {
            Future<int> f = pool_->take();
            if (name == "take-cancel" && f.cancel()) {
                note("cancelled");
                return;
            }
            takes_.push_back(std::move(f));
        } else {
            unknown_op(primitive_, name);
        }
    }

    void finish() override {
        std::multiset<int> out;
        std::int64_t pending = 0;
        for (const auto& f : takes_) {
            auto o = f.get();
            if (o.completed()) {
                out.insert(o.value());
            } else {
                require(!o.cancelled(), "a take that was not cancelled is never cancelled");
                ++pending;
            }
        }
        if (pending > 0) {
            require(pool_->size() == -pending, "waiting takers match the size counter");
        } else {
            require(pool_->size() >= 0, "a negative size always has a waiting taker behind it");
        }
        while (pool_->size() > 0) {
            auto o = pool_->take().get();
            require(o.completed(), "a take from a non-empty pool completes at once");
            if (!o.completed()) break;
            out.insert(o.value());
        }
        std::multiset<int> in(inserted_.begin(), inserted_.end());
        require(out == in, "every element is delivered exactly once");
        check_queue_quiescent(pool_->cqs());
    }

private:
    std::string primitive_;
    std::unique_ptr<Pool> pool_;
    std::set<int> inserted_;
    std::vector<int> next_;
    std::vector<Future<int>> takes_;
};

// ---------------------------------------------------------------------------
// One shared request raced by complete, cancel and get.

class FutureModel final : public Model {
public:
    FutureModel() : f_(make_request<int>([this] { ++handler_runs_; })) {}

    void op(int t, const std::string& name) override {
        if (name == "complete") {
            if (f_.complete(t + 1)) {
                ++completions_;
                winner_ = t + 1;
            }
        } else if (name == "cancel") {
            if (f_.cancel()) ++cancellations_;
        } else if (name == "get") {
            auto o = f_.get();
            if (o.completed()) require(o.value() == winner_, "get returns the value that completed the request");
        } else {
            unknown_op("future", name);
        }
    }

    void finish() override {
        require(completions_ + cancellations_ <= 1, "at most one of complete and cancel succeeds");
        require(handler_runs_ == cancellations_, "the cancellation handler runs once per successful cancel");
        auto o = f_.get();
        if (completions_ == 1) require(o.completed() && o.value() == winner_, "a completed request keeps its value");
        if (cancellations_ == 1) require(o.cancelled(), "a cancelled request stays cancelled");
        if (completions_ + cancellations_ == 0) require(o.not_yet_ready(), "an untouched request stays pending");
    }

private:
    Future<int> f_;
    int handler_runs_ = 0;
    int completions_ = 0;
    int cancellations_ = 0;
    int winner_ = 0;
};

std::unique_ptr<Model> make_model(const ScenarioConfig& s) {
    const std::string& p = s.primitive;
    if (p == "mutex") {
        auto o = primitive_options(s);
        return std::make_unique<LockModel>(s, std::make_unique<SemaphoreLock>(1, o), 1,
                                           o.resume_mode == ResumeMode::sync);
    }
    if (p == "semaphore") {
        auto o = primitive_options(s);
        return std::make_unique<LockModel>(s, std::make_unique<SemaphoreLock>(s.param, o), s.param,
                                           o.resume_mode == ResumeMode::sync);
    }
    if (p == "naive-smart-mutex") return std::make_unique<LockModel>(s, std::make_unique<NaiveLock>(), 1, false);
    if (p == "async-trylock-mutex") {
        return std::make_unique<LockModel>(s, std::make_unique<AsyncTryLock>(s.segment_size), 1, true);
    }
    if (p == "barrier") return std::make_unique<BarrierModel>(s);
    if (p == "latch") return std::make_unique<LatchModel>(s);
    if (p == "pool-queue") return std::make_unique<PoolModel<QueuePool<int>>>(s, p);
    if (p == "pool-stack") return std::make_unique<PoolModel<StackPool<int>>>(s, p);
    if (p == "future") return std::make_unique<FutureModel>();
    throw std::invalid_argument("unknown primitive: " + p);
}

struct Blocks {
    std::vector<std::vector<std::string>> plain;
    std::vector<std::string> cancel;
};

Blocks blocks_for(const ScenarioConfig& s) {
    const std::string& p = s.primitive;
    if (p == "mutex" || p == "semaphore") {
        Blocks b{{{"acquire", "release"}}, {"acquire-cancel", "release"}};
        if (s.resume_mode == "sync") b.plain.push_back({"try-acquire", "release"});
        return b;
    }
    if (p == "barrier") return {{{"arrive"}}, {"arrive-cancel"}};
    if (p == "latch") return {{{"count-down"}, {"await"}}, {"await-cancel"}};
    if (p == "pool-queue" || p == "pool-stack") return {{{"put"}, {"take"}}, {"take-cancel"}};
    if (p == "future") return {{{"complete"}, {"get"}}, {"cancel"}};
    throw std::invalid_argument("no operation blocks for " + p);
}

// Every sequence of blocks with at most max_ops operations; the flag says
// whether it contains the cancellation block.
void programs(const Blocks& b, int max_ops, std::vector<std::pair<std::vector<std::string>, bool>>& out,
              std::vector<std::string>& cur, bool has_cancel) {
    if (!cur.empty()) out.emplace_back(cur, has_cancel);
    auto extend = [&](const std::vector<std::string>& block, bool cancel) {
        if (static_cast<int>(cur.size() + block.size()) > max_ops) return;
        cur.insert(cur.end(), block.begin(), block.end());
        programs(b, max_ops, out, cur, has_cancel || cancel);
        cur.resize(cur.size() - block.size());
    };
    for (const auto& block : b.plain) extend(block, false);
    if (!has_cancel) extend(b.cancel, true);
}

std::string join(const std::vector<std::string>& ops) {
    std::string r;
    for (const auto& o : ops) r += (r.empty() ? "" : ",") + o;
    return r;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    ScenarioConfig s;
    s.name = j.value("name", "");
    s.primitive = j.value("primitive", s.primitive);
    s.resume_mode = j.value("resume_mode", s.resume_mode);
    s.cancellation_mode = j.value("cancellation_mode", s.cancellation_mode);
    s.param = j.value("param", s.param);
    s.segment_size = j.value("segment_size", s.segment_size);
    s.max_spin_cycles = j.value("max_spin_cycles", s.max_spin_cycles);
    s.preemption_bound = j.value("preemption_bound", s.preemption_bound);
    s.expect_violation = j.value("expect_violation", false);
    s.threads = j.at("threads").get<std::vector<std::vector<std::string>>>();
    if (s.threads.empty()) throw std::invalid_argument("a scenario needs at least one thread");
    if (s.segment_size == 0) throw std::invalid_argument("segment_size must be positive");
    return s;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string to_json(const ScenarioConfig& s) {
    nlohmann::json j;
    j["name"] = s.name;
    j["primitive"] = s.primitive;
    j["resume_mode"] = s.resume_mode;
    j["cancellation_mode"] = s.cancellation_mode;
    j["param"] = s.param;
    j["segment_size"] = s.segment_size;
    j["max_spin_cycles"] = s.max_spin_cycles;
    j["preemption_bound"] = s.preemption_bound;
    j["expect_violation"] = s.expect_violation;
    j["threads"] = s.threads;
    return j.dump(2);
}

std::string describe(const ScenarioConfig& s) {
    std::ostringstream os;
    os << s.primitive << "[" << s.resume_mode << "/" << s.cancellation_mode << " param=" << s.param
       << " segm=" << s.segment_size << "]";
    for (std::size_t t = 0; t < s.threads.size(); ++t) os << " T" << t << "{" << join(s.threads[t]) << "}";
    return os.str();
}

ProgramFactory make_program(const ScenarioConfig& s) {
    make_model(s);  // reject unknown primitives early
    for (const auto& ops : s.threads) {
        for (const auto& o : ops) {
            static const std::set<std::string> known = {
                "acquire", "lock", "acquire-cancel", "lock-cancel", "try-acquire", "trylock", "release", "unlock",
                "arrive", "arrive-cancel", "count-down", "await", "await-cancel", "put", "take", "take-cancel",
                "complete", "cancel", "get"};
            if (known.count(o) == 0) throw std::invalid_argument("unknown operation: " + o);
        }
    }
    return [s] {
        std::shared_ptr<Model> model = make_model(s);
        Program p;
        for (std::size_t t = 0; t < s.threads.size(); ++t) {
            p.threads.push_back([model, t, ops = s.threads[t]] {
                for (const auto& o : ops) {
                    note(o);
                    model->op(static_cast<int>(t), o);
                }
                model->thread_done(static_cast<int>(t));
            });
        }
        p.finish = [model] { model->finish(); };
        return p;
    };
}

std::vector<Family> standard_families() {
    std::vector<Family> fs;
    auto add = [&](std::string label, std::string primitive, std::string resume, std::string cancel,
                   std::int64_t param, std::uint32_t segm, int bound) {
        ScenarioConfig s;
        s.preemption_bound = bound;
        s.primitive = std::move(primitive);
        s.resume_mode = std::move(resume);
        s.cancellation_mode = std::move(cancel);
        s.param = param;
        s.segment_size = segm;
        fs.push_back({std::move(label), std::move(s)});
    };
    add("mutex async smart", "mutex", "async", "smart", 1, 1, 5);
    add("mutex async simple", "mutex", "async", "simple", 1, 1, 5);
    add("mutex sync smart", "mutex", "sync", "smart", 1, 1, 5);
    add("mutex sync simple", "mutex", "sync", "simple", 1, 2, 5);
    add("semaphore(2) async smart", "semaphore", "async", "smart", 2, 1, 6);
    add("semaphore(2) sync smart", "semaphore", "sync", "smart", 2, 2, 6);
    add("barrier", "barrier", "async", "simple", 0, 1, 2);
    add("latch(1)", "latch", "async", "smart", 1, 1, 2);
    add("latch(2)", "latch", "async", "smart", 2, 2, 2);
    add("pool queue", "pool-queue", "async", "smart", 0, 1, 2);
    add("pool stack", "pool-stack", "async", "smart", 0, 1, 2);
    add("future", "future", "async", "smart", 0, 1, 2);
    return fs;
}

std::vector<ScenarioConfig> enumerate_scenarios(const Family& family, int max_ops) {
    const Blocks blocks = blocks_for(family.base);
    std::vector<std::pair<std::vector<std::string>, bool>> progs;
    std::vector<std::string> cur;
    programs(blocks, max_ops, progs, cur, false);

    std::vector<ScenarioConfig> out;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [a, ca] : progs) {
        for (const auto& [b, cb] : progs) {
            if (ca == cb) continue;  // exactly one cancellation in total
            if (static_cast<int>(a.size() + b.size()) > max_ops) continue;
            std::string ja = join(a), jb = join(b);
            if (jb < ja) std::swap(ja, jb);
            if (!seen.insert({ja, jb}).second) continue;
            ScenarioConfig s = family.base;
            s.threads = {a, b};
            if (s.primitive == "barrier") {
                s.param = static_cast<std::int64_t>(a.size() + b.size());
            }
            if (s.primitive == "future" && std::count(a.begin(), a.end(), "complete") +
                                                   std::count(b.begin(), b.end(), "complete") == 0) {
                continue;
            }
            s.name = family.label + ": " + describe(s);
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<ScenarioConfig> race_scenarios() {
    std::vector<ScenarioConfig> out;
    // A waiter cancels while the holder unlocks; then both threads lock again.
    ScenarioConfig naive;
    naive.primitive = "naive-smart-mutex";
    naive.name = "naive smart cancellation";
    naive.segment_size = 1;
    naive.preemption_bound = 4;
    naive.expect_violation = true;
    naive.threads = {{"lock", "unlock", "lock", "unlock"}, {"lock-cancel", "unlock", "lock", "unlock"}};
    out.push_back(naive);

    ScenarioConfig smart = naive;
    smart.primitive = "mutex";
    smart.name = "smart cancellation, same program";
    smart.expect_violation = false;
    out.push_back(smart);

    // A waiter is between its decrement and its suspend when the holder
    // unlocks; the holder then tries to lock again.
    ScenarioConfig trylock;
    trylock.primitive = "async-trylock-mutex";
    trylock.name = "asynchronous try-lock";
    trylock.segment_size = 2;
    trylock.preemption_bound = 2;
    trylock.expect_violation = true;
    trylock.threads = {{"lock", "unlock", "trylock", "unlock"}, {"lock", "unlock"}};
    out.push_back(trylock);

    ScenarioConfig sync = trylock;
    sync.primitive = "mutex";
    sync.resume_mode = "sync";
    sync.name = "synchronous try-lock, same program";
    sync.expect_violation = false;
    out.push_back(sync);
    return out;
}

}  // namespace cqs::check
