#ifndef TDAQ_PARALLEL_HPP
#define TDAQ_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace tdaq {

/// Upper bound on worker threads used by parallel_for (default: hardware
/// concurrency). Set once by the CLI's --threads flag.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, count). Each index runs exactly once; the caller
/// must make bodies independent. The first exception thrown is rethrown after
/// all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tdaq

#endif
