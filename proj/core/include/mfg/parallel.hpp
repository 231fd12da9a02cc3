#pragma once

#include <cstddef>
#include <functional>

namespace mfg {

/// Set the worker count used by parallel_for (1 = sequential). Thread
/// counts never change results: tasks write disjoint outputs and all
/// reductions in the library run in a fixed sequential order.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Run fn(i) for i in [0, count). Static block partition over the worker
/// threads; deterministic assignment.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace mfg
