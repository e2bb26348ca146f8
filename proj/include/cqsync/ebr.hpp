#pragma once

#include <cstddef>

// Epoch-based deferred destruction for memory that lock-free readers may still
// be looking at. Every access to shared nodes happens inside a Guard; retired
// nodes are destroyed once every thread has left the epoch they were retired in.
namespace cqs::ebr {

using Deleter = void (*)(void*);

class Guard {
public:
    Guard();
    ~Guard();
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;
};

void retire(void* p, Deleter deleter);

template <class T>
void retire(T* p) {
    retire(static_cast<void*>(p), [](void* q) { delete static_cast<T*>(q); });
}

// Advances the epoch if possible and frees what became safe. Returns the
// number of objects destroyed by this call.
std::size_t collect();

// Frees everything retired so far by the calling thread (and orphaned by exited
// threads). Must be called outside any Guard; spins until other threads leave
// their critical sections.
std::size_t drain();

std::size_t pending();  // retired by this thread and not yet destroyed

}  // namespace cqs::ebr
