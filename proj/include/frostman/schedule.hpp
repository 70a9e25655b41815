#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frostman/errors.hpp"

namespace frostman {

enum class Preset { dim1, dim_epsilon, custom };

std::string preset_name(Preset p);
Preset parse_preset(const std::string& s);

// Finite partial sums (over stages 1..K) of the four series whose convergence
// the construction needs. Informational: the builder reports them, it does not
// gate on them.
struct ScheduleDiagnostics {
  double extinction_sum = 0;      // sum (1-p_k)^(N_k^d)
  double log_weight_sum = 0;      // sum log(k) N_k^(-d(1-eps_k)/2)
  double descendant_sum = 0;      // sum_{k>1} k |log delta_1| N_k^(-d(1-eps_k)/2)
  double mass_tail_term = 0;      // |log delta_1| R_1^(1/2) sum_{m>=1} (1+m) R_{1+m}^(-1/2)
};

// Per-stage scale data for the nested-cube construction. Stage k subdivides
// each surviving cube into N_k^d children of sidelength delta_k = 1/M_k,
// M_k = N_1...N_k, and keeps each child independently with probability p_k.
// Scales are kept in log2 form (delta_k underflows a double early); exact
// cell denominators M_k are kept as 64-bit integers so geometry stays
// bit-exact, and the builder rejects any K where M_K would overflow.
struct ScaleSchedule {
  int d = 1;
  Preset preset = Preset::custom;
  uint64_t N = 0;       // base of N_k = N^k (0 for custom)
  double shape = 0;     // gamma (dim1) or epsilon (dim-epsilon); 0 for custom
  int K = 0;

  // All 0-indexed by k-1, k = 1..K.
  std::vector<uint64_t> Nk;
  std::vector<double> eps_k;
  std::vector<double> log2_delta;  // log2 delta_k (negative)
  std::vector<double> pk;          // selection probability, <= 1/2 for presets
  std::vector<double> log2_Rk;     // log2 of R_k = prod N_j^(d(1-eps_j))
  std::vector<uint64_t> Mk;        // delta_k^{-1}, exact per axis

  ScheduleDiagnostics diagnostics;

  uint64_t M(int k) const { return k == 0 ? 1 : Mk.at(size_t(k - 1)); }
  double delta(int k) const { return 1.0 / double(M(k)); }
  // log2 of the expected-count normalizer R_k; R(0) = 1.
  double log2_R(int k) const { return k == 0 ? 0.0 : log2_Rk.at(size_t(k - 1)); }
};

// The two preset families: eps_k = shape/k ("dim1", full dimension d) and
// eps_k = shape ("dim-epsilon", dimension d(1-shape)). Throws ConfigError if
// any p_k would exceed 1/2 or M_K^d overflows 64-bit per axis.
ScaleSchedule build_schedule(Preset preset, uint64_t N, double shape_param, int d, int K);

// Explicit per-stage branching (and optional selection probabilities,
// default 1) for hand-built test trees. Skips the preset-form invariants but
// keeps the overflow gate.
ScaleSchedule custom_schedule(int d, const std::vector<uint64_t>& Nk,
                              const std::vector<double>& pk = {});

}  // namespace frostman
