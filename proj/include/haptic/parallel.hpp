#pragma once

#include <cstddef>
#include <functional>

namespace haptic {

/// Upper bound on worker threads used by library internals. 0 selects the
/// hardware concurrency. Results never depend on this value.
void set_thread_limit(unsigned n) noexcept;
unsigned thread_limit() noexcept;

/// Runs body(i) for i in [0, n). Each index is visited exactly once; the
/// exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace haptic
