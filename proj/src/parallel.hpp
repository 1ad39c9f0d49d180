#pragma once

#include <cstddef>
#include <functional>

namespace lrsdcut {

// Worker count honoring LRSDCUT_THREADS (0 or unset = hardware concurrency).
unsigned thread_cap();
void set_thread_cap(unsigned threads);

// Runs body(i) for i in [0, count). Each index is independent, so results do
// not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace lrsdcut
