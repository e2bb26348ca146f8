#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "cqsync/atomic.hpp"
#include "cqsync/config.hpp"
#include "cqsync/ebr.hpp"

CQS_BEGIN_NAMESPACE

struct Unit {
    friend constexpr bool operator==(Unit, Unit) noexcept { return true; }
};

enum class FutureState : std::uint8_t { pending, completed, cancelled };

// What get() observed: not yet, a value, or the cancelled mark.
template <class T>
class Outcome {
public:
    static Outcome not_yet() { return Outcome(FutureState::pending); }
    static Outcome cancelled_mark() { return Outcome(FutureState::cancelled); }
    static Outcome ready(T v) {
        Outcome o(FutureState::completed);
        o.value_.emplace(std::move(v));
        return o;
    }

    FutureState state() const noexcept { return state_; }
    bool not_yet_ready() const noexcept { return state_ == FutureState::pending; }
    bool completed() const noexcept { return state_ == FutureState::completed; }
    bool cancelled() const noexcept { return state_ == FutureState::cancelled; }
    const T& value() const {
        CQS_ASSERT(completed());
        return *value_;
    }
    T& value() {
        CQS_ASSERT(completed());
        return *value_;
    }

private:
    explicit Outcome(FutureState s) : state_(s) {}

    FutureState state_;
    std::optional<T> value_;
};

// A pending request: completed or cancelled exactly once. Shared between the
// waiter's Future and whoever will complete it, via an intrusive count.
template <class T>
class Request {
public:
    explicit Request(bool cancellable = true) : cancellable_(cancellable) {}
    virtual ~Request() = default;
    Request(const Request&) = delete;
    Request& operator=(const Request&) = delete;

    template <class U>
    bool complete(U&& v) {
        std::uint32_t expected = kPending;
        if (!state_.compare_exchange(expected, kCompleting)) return false;
        value_.emplace(std::forward<U>(v));
        state_.store(kCompleted);
        state_.unchecked().notify_all();
        return true;
    }

    bool cancel() {
        if (!cancellable_) return false;
        std::uint32_t expected = kPending;
        if (!state_.compare_exchange(expected, kCancelled)) return false;
        state_.unchecked().notify_all();
        on_cancelled();
        return true;
    }

    Outcome<T> get() const { return observe(state_.load()); }

    Outcome<T> blocking_get() const {
        detail::Backoff backoff;
        for (;;) {
            std::uint32_t s = state_.load();
            if (s == kCompleted || s == kCancelled) return observe(s);
#ifdef CQS_INTERLEAVING_SHIM
            if (cqs::runtime::tls_schedule_hook != nullptr) {
                detail::spin_hint();
                continue;
            }
#endif
            if (!backoff.exhausted()) {
                backoff.pause();
            } else {
                state_.unchecked().wait(s);
            }
        }
    }

    FutureState state() const {
        std::uint32_t s = state_.load();
        if (s == kCompleted) return FutureState::completed;
        if (s == kCancelled) return FutureState::cancelled;
        return FutureState::pending;
    }

    bool cancellable() const noexcept { return cancellable_; }

    void add_ref() noexcept { refs_.fetch_add(1, std::memory_order_relaxed); }
    void release() noexcept {
        if (refs_.fetch_sub(1, std::memory_order_acq_rel) == 1) ebr::retire(this);
    }

protected:
    // Runs exactly once, on the thread whose cancel() succeeded.
    virtual void on_cancelled() {}

private:
    static constexpr std::uint32_t kPending = 0;
    static constexpr std::uint32_t kCompleting = 1;
    static constexpr std::uint32_t kCompleted = 2;
    static constexpr std::uint32_t kCancelled = 3;

    Outcome<T> observe(std::uint32_t s) const {
        if (s == kCompleted) return Outcome<T>::ready(*value_);
        if (s == kCancelled) return Outcome<T>::cancelled_mark();
        return Outcome<T>::not_yet();
    }

    detail::Atomic<std::uint32_t> state_{kPending};
    std::optional<T> value_;
    std::atomic<std::uint32_t> refs_{1};
    const bool cancellable_;
};

template <class T>
class FunctionRequest final : public Request<T> {
public:
    explicit FunctionRequest(std::function<void()> handler) : handler_(std::move(handler)) {}

protected:
    void on_cancelled() override {
        if (handler_) handler_();
    }

private:
    std::function<void()> handler_;
};

// Either an immediate result or a handle on a shared Request.
template <class T>
class Future {
public:
    Future() = default;
    Future(const Future& o) : immediate_(o.immediate_), req_(o.req_) {
        if (req_ != nullptr) req_->add_ref();
    }
    Future(Future&& o) noexcept
        : immediate_(std::move(o.immediate_)), req_(std::exchange(o.req_, nullptr)) {
        o.immediate_.reset();
    }
    Future& operator=(Future o) noexcept {
        std::swap(immediate_, o.immediate_);
        std::swap(req_, o.req_);
        return *this;
    }
    ~Future() {
        if (req_ != nullptr) req_->release();
    }

    static Future ready(T v) {
        Future f;
        f.immediate_.emplace(std::move(v));
        return f;
    }
    // Takes over one reference held by the caller.
    static Future adopt(Request<T>* r) {
        Future f;
        f.req_ = r;
        return f;
    }

    bool valid() const noexcept { return req_ != nullptr || immediate_.has_value(); }
    bool is_immediate() const noexcept { return immediate_.has_value(); }
    Request<T>* request() const noexcept { return req_; }

    Outcome<T> get() const {
        if (immediate_) return Outcome<T>::ready(*immediate_);
        CQS_ASSERT(req_ != nullptr);
        return req_->get();
    }

    Outcome<T> blocking_get() const {
        if (immediate_) return Outcome<T>::ready(*immediate_);
        CQS_ASSERT(req_ != nullptr);
        return req_->blocking_get();
    }

    FutureState state() const {
        if (immediate_) return FutureState::completed;
        CQS_ASSERT(req_ != nullptr);
        return req_->state();
    }

    bool cancel() {
        if (immediate_) return false;
        CQS_ASSERT(req_ != nullptr);
        return req_->cancel();
    }

    template <class U>
    bool complete(U&& v) {
        CQS_ASSERT(req_ != nullptr && !immediate_);
        return req_->complete(std::forward<U>(v));
    }

private:
    std::optional<T> immediate_;
    Request<T>* req_ = nullptr;
};

template <class T>
Future<T> make_request(std::function<void()> handler = {}) {
    return Future<T>::adopt(new FunctionRequest<T>(std::move(handler)));
}

CQS_END_NAMESPACE
