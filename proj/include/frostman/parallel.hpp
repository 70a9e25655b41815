#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frostman {

// Worker count, honoring the FROSTMAN_THREADS cap. 1 without OpenMP.
int worker_count();

// Applies FROSTMAN_THREADS to the OpenMP runtime. Called once at startup.
void apply_thread_cap();

namespace detail {
inline void kahan_add(double v, double& s, double& c) {
  double y = v - c;
  double t = s + y;
  c = (t - s) - y;
  s = t;
}
}  // namespace detail

// Plain serial Kahan sum; the reference implementation for the parallel
// reductions below.
template <class F>
double serial_sum(std::size_t n, F&& term) {
  double s = 0, c = 0;
  for (std::size_t i = 0; i < n; ++i) detail::kahan_add(term(i), s, c);
  return s;
}

// Deterministic parallel sum: fixed-size blocks summed independently (Kahan),
// then combined in block order. The result is bitwise identical for any
// thread count, including 1.
template <class F>
double det_block_sum(std::size_t n, F&& term) {
  constexpr std::size_t kBlock = 4096;
  if (n <= kBlock) return serial_sum(n, term);
  std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long b = 0; b < (long long)nblocks; ++b) {
    std::size_t lo = std::size_t(b) * kBlock;
    std::size_t hi = std::min(n, lo + kBlock);
    double s = 0, c = 0;
    for (std::size_t i = lo; i < hi; ++i) detail::kahan_add(term(i), s, c);
    partial[std::size_t(b)] = s;
  }
  double s = 0, c = 0;
  for (double v : partial) detail::kahan_add(v, s, c);
  return s;
}

// Deterministic parallel max over f(i); ties broken toward the smaller index.
template <class F>
std::pair<double, std::size_t> det_max(std::size_t n, F&& value) {
  double best = -1.0 / 0.0;
  std::size_t arg = 0;
  constexpr std::size_t kBlock = 1024;
  std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> bm(nblocks, -1.0 / 0.0);
  std::vector<std::size_t> ba(nblocks, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long b = 0; b < (long long)nblocks; ++b) {
    std::size_t lo = std::size_t(b) * kBlock;
    std::size_t hi = std::min(n, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) {
      double v = value(i);
      if (v > bm[std::size_t(b)]) {
        bm[std::size_t(b)] = v;
        ba[std::size_t(b)] = i;
      }
    }
  }
  for (std::size_t b = 0; b < nblocks; ++b)
    if (bm[b] > best) {
      best = bm[b];
      arg = ba[b];
    }
  return {best, arg};
}

}  // namespace frostman
