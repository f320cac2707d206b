#pragma once

#include <cstddef>
#include <functional>

namespace cascsym {

/// Upper bound on worker threads used by the library. Defaults to the
/// CASCSYM_THREADS environment variable, else the hardware concurrency.
/// Results never depend on this value.
int max_threads();
void set_max_threads(int n);

/// Calls body(begin, end) on disjoint contiguous chunks covering [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace cascsym
