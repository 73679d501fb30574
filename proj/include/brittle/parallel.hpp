#pragma once

#include <cstddef>
#include <functional>

namespace brittle {

/// Global worker cap; 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index writes only its own output slot,
/// so results do not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace brittle
