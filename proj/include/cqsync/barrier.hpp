#pragma once

#include <cstdint>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"
#include "cqsync/cqs.hpp"
#include "cqsync/future.hpp"

CQS_BEGIN_NAMESPACE

// Single-use barrier for a fixed number of parties. Futures returned by
// arrive() cannot be cancelled.
class Barrier {
public:
    explicit Barrier(std::int64_t parties, std::uint32_t segment_size = 16, bool collect_stats = false)
        : parties_(parties), remaining_(parties), cqs_(make_options(segment_size, collect_stats)) {
        CQS_ASSERT(parties >= 1);
    }

    Future<Unit> arrive() {
        std::int64_t r = remaining_.fetch_sub(1);
        CQS_ASSERT(r >= 1);
        if (r > 1) {
            auto f = cqs_.suspend();
            CQS_ASSERT(f.has_value());
            return std::move(*f);
        }
        for (std::int64_t i = 0; i < parties_ - 1; ++i) cqs_.resume(Unit{});
        return Future<Unit>::ready({});
    }

    std::int64_t parties() const noexcept { return parties_; }
    std::int64_t remaining() const { return remaining_.unchecked().load(); }
    Cqs<Unit>& cqs() noexcept { return cqs_; }

private:
    static Cqs<Unit>::Options make_options(std::uint32_t segment_size, bool collect_stats) {
        Cqs<Unit>::Options c;
        c.segment_size = segment_size;
        c.cancellable = false;
        c.collect_stats = collect_stats;
        return c;
    }

    const std::int64_t parties_;
    detail::Atomic<std::int64_t> remaining_;
    Cqs<Unit> cqs_;
};

CQS_END_NAMESPACE
