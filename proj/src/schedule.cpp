#include "frostman/schedule.hpp"

#include <cmath>

namespace frostman {

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::dim1: return "dim1";
    case Preset::dim_epsilon: return "dim-epsilon";
    default: return "custom";
  }
}

Preset parse_preset(const std::string& s) {
  if (s == "dim1") return Preset::dim1;
  if (s == "dim-epsilon" || s == "dim_epsilon") return Preset::dim_epsilon;
  if (s == "custom") return Preset::custom;
  throw ConfigError("unknown preset '" + s + "' (expected dim1 or dim-epsilon)");
}

namespace {

// Largest log2(M_K) such that per-axis cell numerators stay exact in uint64.
constexpr double kMaxLog2M = 63.0;

void finish(ScaleSchedule& s) {
  int K = s.K;
  s.log2_delta.resize(size_t(K));
  s.log2_Rk.resize(size_t(K));
  s.Mk.resize(size_t(K));
  double l2m = 0, l2r = 0;
  uint64_t m = 1;
  for (int k = 1; k <= K; ++k) {
    double l2N = std::log2(double(s.Nk[size_t(k - 1)]));
    l2m += l2N;
    if (l2m > kMaxLog2M)
      throw ConfigError("stage " + std::to_string(k) +
                        ": log2(1/delta_k) = " + std::to_string(l2m) +
                        " exceeds exact 64-bit cell arithmetic");
    m *= s.Nk[size_t(k - 1)];
    s.Mk[size_t(k - 1)] = m;
    s.log2_delta[size_t(k - 1)] = -l2m;
    // R_k = prod p_j N_j^d; for presets p_j = N_j^(-d eps_j) this is
    // prod N_j^(d(1-eps_j)).
    l2r += s.d * l2N + std::log2(s.pk[size_t(k - 1)]);
    s.log2_Rk[size_t(k - 1)] = l2r;
  }

  // Finite partial sums of the construction's convergence requirements.
  ScheduleDiagnostics& diag = s.diagnostics;
  double mass_tail = 0;
  for (int k = 1; k <= K; ++k) {
    double nkd_pow = std::exp2(double(s.d) * std::log2(double(s.Nk[size_t(k - 1)])));  // N_k^d
    diag.extinction_sum += std::exp(nkd_pow * std::log1p(-s.pk[size_t(k - 1)]));
    double half_weight = std::exp2(-0.5 * double(s.d) * (1.0 - s.eps_k[size_t(k - 1)]) *
                                   std::log2(double(s.Nk[size_t(k - 1)])));
    if (k >= 2) {
      diag.log_weight_sum += std::log(double(k)) * half_weight;
      diag.descendant_sum += double(k) * (-s.log2_delta[0] * std::log(2.0)) * half_weight;
      mass_tail += double(k) * std::exp2(-0.5 * s.log2_R(k));
    }
  }
  diag.mass_tail_term = (-s.log2_delta[0] * std::log(2.0)) * std::exp2(0.5 * s.log2_R(1)) * mass_tail;
}

}  // namespace

ScaleSchedule build_schedule(Preset preset, uint64_t N, double shape_param, int d, int K) {
  if (preset == Preset::custom) throw ConfigError("build_schedule: use custom_schedule for explicit stages");
  if (N < 2) throw ConfigError("build_schedule: N must be >= 2");
  if (K < 1) throw ConfigError("build_schedule: K must be >= 1");
  if (d < 1) throw ConfigError("build_schedule: d must be >= 1");
  if (!(shape_param > 0.0 && shape_param < 1.0))
    throw ConfigError("build_schedule: shape parameter must lie in (0,1)");

  ScaleSchedule s;
  s.d = d;
  s.preset = preset;
  s.N = N;
  s.shape = shape_param;
  s.K = K;
  s.Nk.resize(size_t(K));
  s.eps_k.resize(size_t(K));
  s.pk.resize(size_t(K));
  double l2N = std::log2(double(N));
  for (int k = 1; k <= K; ++k) {
    // N_k = N^k; overflow of the running product is caught in finish().
    if (double(k) * l2N > 63.0)
      throw ConfigError("build_schedule: N_" + std::to_string(k) + " overflows 64-bit");
    uint64_t nk = 1;
    for (int j = 0; j < k; ++j) nk *= N;
    s.Nk[size_t(k - 1)] = nk;
    double eps = (preset == Preset::dim1) ? shape_param / double(k) : shape_param;
    s.eps_k[size_t(k - 1)] = eps;
    // p_k = N_k^(-d eps_k)
    double p = std::exp2(-double(d) * eps * double(k) * l2N);
    if (p > 0.5 + 1e-15)
      throw ConfigError("build_schedule: p_" + std::to_string(k) + " = " + std::to_string(p) +
                        " exceeds 1/2");
    s.pk[size_t(k - 1)] = std::min(p, 0.5);
  }
  finish(s);
  return s;
}

ScaleSchedule custom_schedule(int d, const std::vector<uint64_t>& Nk,
                              const std::vector<double>& pk) {
  if (Nk.empty()) throw ConfigError("custom_schedule: no stages");
  if (d < 1) throw ConfigError("custom_schedule: d must be >= 1");
  ScaleSchedule s;
  s.d = d;
  s.preset = Preset::custom;
  s.K = int(Nk.size());
  s.Nk = Nk;
  for (uint64_t nk : Nk)
    if (nk < 2) throw ConfigError("custom_schedule: every N_k must be >= 2");
  s.pk = pk.empty() ? std::vector<double>(Nk.size(), 1.0) : pk;
  if (s.pk.size() != Nk.size()) throw ConfigError("custom_schedule: pk size mismatch");
  for (double p : s.pk)
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("custom_schedule: p_k out of (0,1]");
  // Back out eps_k from p_k = N_k^(-d eps_k) so diagnostics stay meaningful.
  s.eps_k.resize(Nk.size());
  for (size_t i = 0; i < Nk.size(); ++i)
    s.eps_k[i] = -std::log2(s.pk[i]) / (double(d) * std::log2(double(Nk[i])));
  finish(s);
  return s;
}

}  // namespace frostman
