#include "frostman/kernel_lab.hpp"

#include <algorithm>
#include <cmath>

#include "frostman/errors.hpp"
#include "frostman/parallel.hpp"
#include "frostman/rng.hpp"

namespace frostman {

double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

namespace {

inline double dist2(const StageMeasure& m, size_t i, const std::vector<double>& u) {
  double s = 0;
  for (size_t a = 0; a < size_t(m.d); ++a) {
    double t = u[a] - m.coord(i, int(a));
    s += t * t;
  }
  return s;
}

void check_params(const StageMeasure& m, const std::vector<double>& u, const KernelParams& kp) {
  if (int(u.size()) != m.d) throw ConfigError("frak_A: center dimension mismatch");
  if (kp.lambda < 1.0) throw ConfigError("frak_A: lambda must be >= 1");
  if (!(kp.p > 0) || kp.n < 2) throw ConfigError("frak_A: need p > 0 and n >= 2");
}

}  // namespace

double frak_A_serial(const StageMeasure& m, const std::vector<double>& u, const KernelParams& kp) {
  check_params(m, u, kp);
  double e = -kp.p * double(kp.n - 1) / 8.0;  // exponent of (1 + (lambda dist)^2)
  double l2 = kp.lambda * kp.lambda;
  return serial_sum(m.count(),
                    [&](size_t i) { return m.weight(i) * std::pow(1.0 + l2 * dist2(m, i, u), e); });
}

double frak_A(const StageMeasure& m, const std::vector<double>& u, const KernelParams& kp) {
  check_params(m, u, kp);
  double e = -kp.p * double(kp.n - 1) / 8.0;
  double l2 = kp.lambda * kp.lambda;
  return det_block_sum(m.count(),
                       [&](size_t i) { return m.weight(i) * std::pow(1.0 + l2 * dist2(m, i, u), e); });
}

std::vector<double> frak_A_shells(const StageMeasure& m, const std::vector<double>& u,
                                  const KernelParams& kp) {
  check_params(m, u, kp);
  double e = -kp.p * double(kp.n - 1) / 8.0;
  double l2 = kp.lambda * kp.lambda;
  int j0 = std::max(0, int(std::ceil(std::log2(kp.lambda))));
  std::vector<double> shells(size_t(j0) + 1, 0.0);
  std::vector<double> comp(size_t(j0) + 1, 0.0);
  for (size_t i = 0; i < m.count(); ++i) {
    double d2 = dist2(m, i, u);
    double dist = std::sqrt(d2);
    int j;
    if (dist <= 1.0 / kp.lambda)
      j = j0;  // innermost: within one wavelength
    else {
      j = dist >= 1.0 ? 0 : std::min(j0 - 1, int(std::floor(-std::log2(dist))));
      j = std::max(j, 0);
    }
    detail::kahan_add(m.weight(i) * std::pow(1.0 + l2 * d2, e), shells[size_t(j)],
                      comp[size_t(j)]);
  }
  return shells;
}

double sup_frak_A(const StageMeasure& m, const KernelParams& kp, int extra_random, uint64_t seed) {
  size_t n = m.count();
  std::vector<double> coords(n * size_t(m.d));
  for (size_t i = 0; i < n; ++i)
    for (int a = 0; a < m.d; ++a) coords[i * size_t(m.d) + size_t(a)] = m.coord(i, a);
  double e = -kp.p * double(kp.n - 1) / 8.0;
  double l2 = kp.lambda * kp.lambda;
  size_t d = size_t(m.d);

  auto value_at = [&](const double* u) {
    return det_block_sum(n, [&](size_t i) {
      double s = 0;
      for (size_t a = 0; a < d; ++a) {
        double t = u[a] - coords[i * d + a];
        s += t * t;
      }
      return m.weight(i) * std::pow(1.0 + l2 * s, e);
    });
  };

  // The kernel is radially decreasing, so candidate maxima live on supp mu;
  // atoms first, a few uniform centers as a cross-check.
  double best = 0;
  for (size_t c = 0; c < n; ++c) best = std::max(best, value_at(&coords[c * d]));
  CounterRng rng(seed, 0, 0xce17);
  std::vector<double> u(d);
  for (int i = 0; i < extra_random; ++i) {
    for (size_t a = 0; a < d; ++a)
      u[a] = std::ldexp(double(rng.word(uint64_t(i) * 64 + uint64_t(a))), -64);
    best = std::max(best, value_at(u.data()));
  }
  return best;
}

double critical_p_star(double alpha, int n) {
  if (!(alpha > 0) || n < 2) throw ConfigError("critical_p_star: need alpha > 0, n >= 2");
  return 4.0 * alpha / double(n - 1);
}

double beta_target(double p, int n, double alpha) {
  if (!(p > 0)) throw ConfigError("beta_target: need p > 0");
  return std::min(p * double(n - 1) / 4.0, alpha);
}

DecayFit fit_decay_exponent(const StageMeasure& m, int n, double p, double alpha,
                            const std::vector<double>& log2_lambdas, int extra_random,
                            uint64_t seed) {
  if (log2_lambdas.size() < 5) throw ConfigError("fit_decay_exponent: need >= 5 lambda points");
  double span = *std::max_element(log2_lambdas.begin(), log2_lambdas.end()) -
                *std::min_element(log2_lambdas.begin(), log2_lambdas.end());
  if (span < 4.0) throw ConfigError("fit_decay_exponent: lambda grid must span >= 4 octaves");
  double cap = -m.log2_delta - 4.0;
  DecayFit out;
  double pstar = critical_p_star(alpha, n);
  out.log_corrected = std::abs(p - pstar) < 1e-12;
  out.target = -beta_target(p, n, alpha);
  std::vector<double> ys;
  for (double l2l : log2_lambdas) {
    if (l2l > cap)
      throw ResolutionError("fit_decay_exponent: lambda 2^" + std::to_string(l2l) +
                            " beyond atomization resolution 2^" + std::to_string(cap));
    KernelParams kp{n, p, std::exp2(l2l), alpha};
    double s = sup_frak_A(m, kp, extra_random, seed);
    double y = std::log2(s);
    if (out.log_corrected) y -= std::log2(std::max(l2l, 1.0));  // divide out the log factor
    out.log2_lambda.push_back(l2l);
    out.log2_sup.push_back(y);
    ys.push_back(y);
  }
  out.fit = least_squares(out.log2_lambda, ys);
  return out;
}

}  // namespace frostman
