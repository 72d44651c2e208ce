#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace hardygeo {

// Caps the number of worker threads used by parallel_for / parallel_sum.
// 0 restores the hardware default. Thread count never changes results:
// work is split into fixed-size chunks and combined in index order.
void set_worker_threads(int n);
int worker_threads();

// Runs fn(i) for every i in [begin, end). fn must not touch state shared
// across indices without its own synchronization.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

// Sum of term(i) over [begin, end). Partial sums are taken per fixed chunk
// and combined by a fixed-order pairwise tree, so the result is bit-identical
// for any worker count, including the serial path.
double parallel_sum(std::size_t begin, std::size_t end,
                    const std::function<double(std::size_t)>& term);

// Pairwise-tree sum of a vector in index order (used by parallel_sum and by
// callers that build their own partials).
double pairwise_sum(const double* v, std::size_t n);

// Deterministic per-task seed derived from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t base, const char* tag);

}  // namespace hardygeo
