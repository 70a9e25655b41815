#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "frostman/rational.hpp"

namespace frostman {

// Finite-measure integral operator Tf(x) = sum_j K(x_j, y_j) f(y_j) tau_j on
// a common support; the kernel matrix is materialized at construction.
struct SchurInstance {
  int d = 1;
  std::vector<double> points;  // stride d
  std::vector<double> tau;     // positive weights, not necessarily summing to 1
  std::vector<double> Kmat;    // row-major m x m, K(x_i, y_j)
  Rat s = Rat(1), q = Rat(2), r = Rat(2);

  size_t size() const { return tau.size(); }
  static SchurInstance from_kernel(
      int d, std::vector<double> points, std::vector<double> tau,
      const std::function<double(const double*, const double*, int)>& kernel, Rat s, Rat q,
      Rat r);
};

struct TripleCheck {
  bool ok = false;
  std::string reason;
  Rat holder_1;  // 1/r
  Rat holder_2;  // 1/s - 1/r  (reciprocal of sr/(r-s))
  Rat holder_3;  // 1/q - 1/r  (reciprocal of qr/(r-q))
};

// Young scaling relation 1 + 1/r = 1/s + 1/q, plus the derived Holder triple
// landing in [1, inf] (its reciprocals sum to exactly 1).
TripleCheck check_exponent_triple(const Rat& s, const Rat& q, const Rat& r);

// A_s = max_x (sum_y |K(x,y)|^s tau_y)^(1/s); B_s with roles swapped.
// s = inf means the sup norm.
std::pair<double, double> schur_bounds(const SchurInstance& inst);

std::vector<double> apply_operator(const SchurInstance& inst, const std::vector<double>& f);

// L^p(tau) norm of values on the support; p = inf -> max.
double lp_norm(const std::vector<double>& tau, const std::vector<double>& v, const Rat& p);

struct YoungReport {
  uint64_t trials = 0;
  double A_s = 0, B_s = 0;
  double bound_factor = 0;  // A_s^(1-s/r) B_s^(s/r)
  double max_ratio = 0;     // max over f of ||Tf||_r / (bound_factor ||f||_q)
  bool pass = false;        // max_ratio <= 1 + 1e-9
};

// Random-f stress test of ||Tf||_r <= A_s^(1-s/r) B_s^(s/r) ||f||_q with a
// Gaussian + two-sided-Pareto mixture, optionally followed by coordinate
// ascent from the best f found.
YoungReport verify_young_inequality(const SchurInstance& inst, uint64_t trials, uint64_t seed,
                                    int ascent_steps = 0);

// Largest singular value of [K(x_i,y_j) sqrt(tau_i tau_j)] by power
// iteration; exact oracle for the (s,q,r) = (1,2,2) Schur-test case, always
// <= sqrt(A_1 B_1).
double brute_operator_norm_2_2(const SchurInstance& inst);

// Deterministic random instance generator for stress ensembles: random
// support in [0,1]^d, random positive weights, and a random smooth kernel
// (mixture of bracket powers, Gaussians and rank-one terms).
SchurInstance random_instance(uint64_t seed, size_t max_size, const Rat& s, const Rat& q,
                              const Rat& r);

}  // namespace frostman
