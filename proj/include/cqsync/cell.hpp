#pragma once

#include <cstdint>
#include <utility>

#include "cqsync/config.hpp"
#include "cqsync/future.hpp"

CQS_BEGIN_NAMESPACE

enum class CellKind : std::uint8_t { empty, value, request, taken, broken, resumed, cancelled, refused };

inline const char* to_string(CellKind k) noexcept {
    switch (k) {
        case CellKind::empty: return "empty";
        case CellKind::value: return "value";
        case CellKind::request: return "request";
        case CellKind::taken: return "taken";
        case CellKind::broken: return "broken";
        case CellKind::resumed: return "resumed";
        case CellKind::cancelled: return "cancelled";
        case CellKind::refused: return "refused";
    }
    return "?";
}

namespace detail {

// Cell word layout. Requests are 8-aligned pointers (low bits 000), values
// carry tag 001 (a boxed pointer or the unit constant), and the terminal
// markers are small constants with tag 010.
inline constexpr std::uintptr_t kEmptyCell = 0;
inline constexpr std::uintptr_t kTakenCell = (1 << 3) | 2;
inline constexpr std::uintptr_t kBrokenCell = (2 << 3) | 2;
inline constexpr std::uintptr_t kResumedCell = (3 << 3) | 2;
inline constexpr std::uintptr_t kCancelledCell = (4 << 3) | 2;
inline constexpr std::uintptr_t kRefusedCell = (5 << 3) | 2;
inline constexpr std::uintptr_t kUnitValue = (7 << 3) | 1;

inline CellKind cell_kind(std::uintptr_t w) noexcept {
    if (w == kEmptyCell) return CellKind::empty;
    switch (w & 7) {
        case 0: return CellKind::request;
        case 1: return CellKind::value;
        default: break;
    }
    switch (w) {
        case kTakenCell: return CellKind::taken;
        case kBrokenCell: return CellKind::broken;
        case kResumedCell: return CellKind::resumed;
        case kCancelledCell: return CellKind::cancelled;
        default: return CellKind::refused;
    }
}

inline bool legal_transition(CellKind from, CellKind to) noexcept {
    using K = CellKind;
    switch (from) {
        case K::empty: return to == K::value || to == K::request;
        case K::value: return to == K::taken || to == K::broken || to == K::cancelled || to == K::refused;
        case K::request:
            return to == K::resumed || to == K::cancelled || to == K::refused || to == K::value;
        default: return false;
    }
}

inline void check_transition([[maybe_unused]] std::uintptr_t from, [[maybe_unused]] std::uintptr_t to) {
    CQS_ASSERT(legal_transition(cell_kind(from), cell_kind(to)));
}

// Moves a resumption value in and out of a cell word. The word owns the value
// until exactly one party takes it back out.
template <class T>
struct ValueCodec {
    static std::uintptr_t encode(T&& v) { return reinterpret_cast<std::uintptr_t>(new T(std::move(v))) | 1; }
    static T take(std::uintptr_t w) {
        T* p = reinterpret_cast<T*>(w & ~std::uintptr_t{7});
        T v = std::move(*p);
        delete p;
        return v;
    }
    static void dispose(std::uintptr_t w) { delete reinterpret_cast<T*>(w & ~std::uintptr_t{7}); }
};

template <>
struct ValueCodec<Unit> {
    static std::uintptr_t encode(Unit&&) noexcept { return kUnitValue; }
    static Unit take(std::uintptr_t) noexcept { return {}; }
    static void dispose(std::uintptr_t) noexcept {}
};

}  // namespace detail

CQS_END_NAMESPACE
