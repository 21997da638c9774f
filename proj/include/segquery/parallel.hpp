#pragma once

#include <cstddef>
#include <functional>

namespace segquery {

/// Runs fn(i) for i in [0, count) on at most `jobs` threads. Joins all work
/// before returning; if any call threw, rethrows the lowest-index exception
/// so error surfacing is deterministic regardless of scheduling.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace segquery
