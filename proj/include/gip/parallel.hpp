#pragma once

// Fixed-chunk parallel loops over grid nodes.
//
// Work is always cut into chunks of kChunkSize nodes regardless of how many
// threads run, and partial results are combined in chunk order. Sums are
// therefore bit-identical for every worker count, including 1.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gip::parallel {

inline constexpr std::size_t kChunkSize = 8192;

/// Worker count: GIP_THREADS if set and positive, else hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("GIP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Calls body(chunk_index, begin, end) once per chunk. Chunks may run
/// concurrently; body must only write to chunk-private state.
template <class Body>
void for_each_chunk(std::size_t n, Body&& body) {
  const std::size_t chunks = chunk_count(n);
  const std::size_t workers = std::min(worker_count(), chunks);
  auto run = [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    body(c, begin, std::min(n, begin + kChunkSize));
  };
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) run(c);
  };
  for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

/// Sum of term(k) for k in [0, n), reduced in fixed chunk order.
template <class Term>
double ordered_sum(std::size_t n, Term&& term) {
  std::vector<double> partial(chunk_count(n), 0.0);
  for_each_chunk(n, [&](std::size_t c, std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t k = b; k < e; ++k) s += term(k);
    partial[c] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Per-bucket sums: body(k, acc) adds node k's contributions into acc (size
/// `width`). Buckets are reduced in chunk order.
template <class Body>
std::vector<double> ordered_bucket_sum(std::size_t n, std::size_t width, Body&& body) {
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks * width, 0.0);
  for_each_chunk(n, [&](std::size_t c, std::size_t b, std::size_t e) {
    double* acc = partial.data() + c * width;
    for (std::size_t k = b; k < e; ++k) body(k, acc);
  });
  std::vector<double> total(width, 0.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t i = 0; i < width; ++i) total[i] += partial[c * width + i];
  return total;
}

}  // namespace gip::parallel
