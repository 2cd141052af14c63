#pragma once

#include <cstddef>
#include <functional>

namespace mmsurf {

/// Number of worker threads to use when a caller passes 0.
int default_workers();

/// Runs body(begin, end) over [0, count) split into contiguous chunks, one
/// chunk per worker. Each index is visited exactly once; results written by
/// index are therefore independent of the worker count.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mmsurf
