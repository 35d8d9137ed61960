#ifndef SGUR_PARALLEL_HPP
#define SGUR_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace sgur {

// Worker cap. 0 restores the default (SGUR_THREADS env var if set, otherwise
// hardware concurrency).
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs fn over disjoint contiguous chunks of [begin, end). Chunk boundaries
// depend only on the range size and the resolved worker count, never on
// scheduling, so callers that write disjoint outputs are bitwise reproducible.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}

#endif
