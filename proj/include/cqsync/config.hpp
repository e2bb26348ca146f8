#pragma once

#include <cstdio>
#include <cstdlib>

// Builds that define CQS_INTERLEAVING_SHIM get their own inline namespace so
// shimmed and plain instantiations of the same templates can live in one binary.
#ifdef CQS_INTERLEAVING_SHIM
#define CQS_ABI_NAMESPACE shim
#else
#define CQS_ABI_NAMESPACE plain
#endif

#define CQS_BEGIN_NAMESPACE \
    namespace cqs {         \
    inline namespace CQS_ABI_NAMESPACE {
#define CQS_END_NAMESPACE \
    }                     \
    }

#if defined(CQS_DEBUG_CHECKS) || !defined(NDEBUG)
#define CQS_CHECKS_ENABLED 1
#else
#define CQS_CHECKS_ENABLED 0
#endif

namespace cqs::runtime {

// A test harness may install a handler that throws instead of aborting.
using CheckHandler = void (*)(const char* expr, const char* file, int line);
inline thread_local CheckHandler tls_check_handler = nullptr;

[[noreturn]] inline void check_failed(const char* expr, const char* file, int line) {
    if (tls_check_handler != nullptr) tls_check_handler(expr, file, line);
    std::fprintf(stderr, "cqsync: check failed: %s (%s:%d)\n", expr, file, line);
    std::abort();
}

}  // namespace cqs::runtime

#if CQS_CHECKS_ENABLED
#define CQS_ASSERT(expr) \
    ((expr) ? static_cast<void>(0) : ::cqs::runtime::check_failed(#expr, __FILE__, __LINE__))
#else
#define CQS_ASSERT(expr) static_cast<void>(0)
#endif
