#include "cqsync/ebr.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "cqsync/config.hpp"

namespace cqs::ebr {
namespace {

constexpr unsigned kCollectEvery = 128;

struct Retired {
    void* p;
    Deleter deleter;
    std::uint64_t epoch;
};

struct Record {
    std::atomic<std::uint64_t> state{0};  // (epoch << 1) | active
    std::atomic<bool> in_use{false};
    Record* next = nullptr;
};

class Domain {
public:
    static Domain& instance() {
        static Domain* d = new Domain;  // outlives thread-local teardown
        return *d;
    }

    Record* acquire() {
        for (Record* r = head_.load(); r != nullptr; r = r->next) {
            bool expected = false;
            if (!r->in_use.load() && r->in_use.compare_exchange_strong(expected, true)) return r;
        }
        auto* r = new Record;
        r->in_use.store(true);
        Record* h = head_.load();
        do {
            r->next = h;
        } while (!head_.compare_exchange_weak(h, r));
        return r;
    }

    void release(Record* r, std::vector<Retired>&& leftovers) {
        r->state.store(0);
        if (!leftovers.empty()) {
            std::lock_guard lock(orphan_mu_);
            orphans_.insert(orphans_.end(), leftovers.begin(), leftovers.end());
        }
        r->in_use.store(false);
    }

    bool try_advance() {
        std::uint64_t e = epoch.load();
        for (Record* r = head_.load(); r != nullptr; r = r->next) {
            if (!r->in_use.load()) continue;
            std::uint64_t s = r->state.load();
            if ((s & 1) != 0 && (s >> 1) != e) return false;
        }
        epoch.compare_exchange_strong(e, e + 1);
        return true;
    }

    std::size_t collect_orphans(bool wait) {
        std::vector<Retired> ready;
        {
            std::unique_lock lock(orphan_mu_, std::defer_lock);
            if (wait) {
                lock.lock();
            } else if (!lock.try_lock()) {
                return 0;
            }
            ready = take_ready(orphans_, epoch.load());
        }
        return run(ready);
    }

    std::size_t orphan_count() {
        std::lock_guard lock(orphan_mu_);
        return orphans_.size();
    }

    static std::vector<Retired> take_ready(std::vector<Retired>& list, std::uint64_t e) {
        auto split = std::stable_partition(list.begin(), list.end(),
                                           [e](const Retired& r) { return r.epoch + 2 > e; });
        std::vector<Retired> ready(split, list.end());
        list.erase(split, list.end());
        return ready;
    }

    static std::size_t run(const std::vector<Retired>& ready) {
        for (const Retired& r : ready) r.deleter(r.p);
        return ready.size();
    }

    std::atomic<std::uint64_t> epoch{2};

private:
    std::atomic<Record*> head_{nullptr};
    std::mutex orphan_mu_;
    std::vector<Retired> orphans_;
};

struct Local {
    Record* rec = nullptr;
    unsigned nesting = 0;
    unsigned since_collect = 0;
    std::vector<Retired> limbo;

    Record* record() {
        if (rec == nullptr) rec = Domain::instance().acquire();
        return rec;
    }

    ~Local() {
        if (rec != nullptr) Domain::instance().release(rec, std::move(limbo));
    }
};

thread_local Local tls;

std::size_t collect_local() {
    Domain& d = Domain::instance();
    d.try_advance();
    std::vector<Retired> ready = Domain::take_ready(tls.limbo, d.epoch.load());
    return Domain::run(ready) + d.collect_orphans(false);
}

}  // namespace

Guard::Guard() {
    Local& l = tls;
    if (l.nesting++ == 0) {
        Record* r = l.record();
        std::uint64_t e = Domain::instance().epoch.load();
        r->state.store((e << 1) | 1);
    }
}

Guard::~Guard() {
    Local& l = tls;
    if (--l.nesting == 0) l.rec->state.store(0);
}

void retire(void* p, Deleter deleter) {
    Local& l = tls;
    l.limbo.push_back({p, deleter, Domain::instance().epoch.load()});
    if (++l.since_collect >= kCollectEvery) {
        l.since_collect = 0;
        collect_local();
    }
}

std::size_t collect() { return collect_local(); }

std::size_t drain() {
    CQS_ASSERT(tls.nesting == 0);
    Domain& d = Domain::instance();
    std::size_t freed = 0;
    for (;;) {
        freed += Domain::run(Domain::take_ready(tls.limbo, d.epoch.load()));
        freed += d.collect_orphans(true);
        if (tls.limbo.empty() && d.orphan_count() == 0) return freed;
        if (!d.try_advance()) std::this_thread::yield();
    }
}

std::size_t pending() { return tls.limbo.size(); }

}  // namespace cqs::ebr
