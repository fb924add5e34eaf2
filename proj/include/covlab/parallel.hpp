#pragma once

#include <cstddef>
#include <functional>

namespace covlab {

/// Effective worker count: min(hardware_concurrency, COVLAB_THREADS when set).
int thread_budget();

/// Runs fn(i) for i in [0, n). Tasks must be independent; results must not
/// depend on scheduling (callers write into pre-sized slots).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace covlab
