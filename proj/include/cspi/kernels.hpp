#pragma once

// Deterministic data-parallel reductions.
//
// Work is split into fixed chunks of kChunk indices independent of the thread
// count. Each chunk is accumulated in index order and the chunk partials are
// then combined in chunk order, so the OpenMP version returns exactly the
// bits of the serial reference.

#include <cstddef>
#include <exception>
#include <vector>

namespace cspi::kernels {

inline constexpr std::size_t kChunk = 1024;

enum class Execution { Serial, Parallel };

/// Caps the OpenMP team size from CSPI_LAB_THREADS when it is set.
void apply_thread_limit_from_env();

int max_threads();

template <class Acc, class F>
Acc chunked_reduce_serial(std::size_t count, const F& f) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  Acc total{};
  for (std::size_t c = 0; c < chunks; ++c) {
    Acc part{};
    const std::size_t end = (c + 1) * kChunk < count ? (c + 1) * kChunk : count;
    for (std::size_t i = c * kChunk; i < end; ++i) part += f(i);
    total += part;
  }
  return total;
}

template <class Acc, class F>
Acc chunked_reduce_omp(std::size_t count, const F& f) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<Acc> partial(chunks);
  std::vector<std::exception_ptr> failure(chunks);
  const long n_chunks = static_cast<long>(chunks);
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < n_chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = begin + kChunk < count ? begin + kChunk : count;
    try {
      Acc part{};
      for (std::size_t i = begin; i < end; ++i) part += f(i);
      partial[c] = part;
    } catch (...) {
      failure[c] = std::current_exception();
    }
  }
  // Report the failure the serial loop would have hit first.
  for (const auto& e : failure)
    if (e) std::rethrow_exception(e);
  Acc total{};
  for (const auto& p : partial) total += p;
  return total;
}

template <class Acc, class F>
Acc chunked_reduce(Execution exec, std::size_t count, const F& f) {
  return exec == Execution::Serial ? chunked_reduce_serial<Acc>(count, f)
                                   : chunked_reduce_omp<Acc>(count, f);
}

/// Evaluates f(i) for every i and returns the results in index order.
template <class T, class F>
std::vector<T> map_indexed(Execution exec, std::size_t count, const F& f) {
  std::vector<T> out(count);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> failure(count);
  const long n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
      failure[i] = std::current_exception();
    }
  }
  for (const auto& e : failure)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace cspi::kernels
