#include "hardygeo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace hardygeo {
namespace {

std::atomic<int> g_threads{0};

constexpr std::size_t kChunk = 4096;

int effective_threads() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Hands out chunk indices atomically; chunk boundaries are fixed by kChunk,
// so which thread runs a chunk never affects what is computed.
void run_chunks(std::size_t nchunks, const std::function<void(std::size_t)>& chunk_fn) {
  int nt = effective_threads();
  if (nt == 1 || nchunks <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c) chunk_fn(c);
    return;
  }
  nt = static_cast<int>(std::min<std::size_t>(nt, nchunks));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= nchunks) return;
      chunk_fn(c);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt) - 1);
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

void set_worker_threads(int n) { g_threads.store(n, std::memory_order_relaxed); }

int worker_threads() { return effective_threads(); }

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  if (end <= begin) return;
  std::size_t n = end - begin;
  std::size_t nchunks = (n + kChunk - 1) / kChunk;
  run_chunks(nchunks, [&](std::size_t c) {
    std::size_t lo = begin + c * kChunk;
    std::size_t hi = std::min(end, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double parallel_sum(std::size_t begin, std::size_t end,
                    const std::function<double(std::size_t)>& term) {
  if (end <= begin) return 0.0;
  std::size_t n = end - begin;
  std::size_t nchunks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);
  run_chunks(nchunks, [&](std::size_t c) {
    std::size_t lo = begin + c * kChunk;
    std::size_t hi = std::min(end, lo + kChunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  });
  return pairwise_sum(partial.data(), partial.size());
}

std::uint64_t derive_seed(std::uint64_t base, const char* tag) {
  // FNV-1a over the tag, mixed with the base seed.
  std::uint64_t h = 1469598103934665603ull;
  for (const char* p = tag; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ull;
  }
  h ^= base + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

}  // namespace hardygeo
