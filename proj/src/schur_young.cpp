#include "frostman/schur_young.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frostman/errors.hpp"
#include "frostman/rng.hpp"

namespace frostman {

SchurInstance SchurInstance::from_kernel(
    int d, std::vector<double> points, std::vector<double> tau,
    const std::function<double(const double*, const double*, int)>& kernel, Rat s, Rat q, Rat r) {
  SchurInstance inst;
  inst.d = d;
  inst.points = std::move(points);
  inst.tau = std::move(tau);
  inst.s = s;
  inst.q = q;
  inst.r = r;
  size_t m = inst.tau.size();
  if (inst.points.size() != m * size_t(d)) throw ConfigError("SchurInstance: size mismatch");
  for (double t : inst.tau)
    if (!(t > 0)) throw ConfigError("SchurInstance: weights must be positive");
  inst.Kmat.resize(m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      double v = kernel(&inst.points[i * size_t(d)], &inst.points[j * size_t(d)], d);
      if (!std::isfinite(v))
        throw ConfigError("SchurInstance: non-finite kernel at pair (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      inst.Kmat[i * m + j] = v;
    }
  return inst;
}

TripleCheck check_exponent_triple(const Rat& s, const Rat& q, const Rat& r) {
  TripleCheck c;
  auto in_range = [](const Rat& e) { return e.is_inf() || e >= Rat(1); };
  if (!in_range(s) || !in_range(q) || !in_range(r)) {
    c.reason = "exponents must lie in [1, inf]";
    return c;
  }
  Rat lhs = Rat(1) + r.recip();
  Rat rhs = s.recip() + q.recip();
  if (lhs != rhs) {
    c.reason = "1 + 1/r = " + lhs.str() + " but 1/s + 1/q = " + rhs.str();
    return c;
  }
  c.holder_1 = r.recip();
  c.holder_2 = s.recip() - r.recip();
  c.holder_3 = q.recip() - r.recip();
  for (const Rat* h : {&c.holder_2, &c.holder_3})
    if (*h < Rat(0) || *h > Rat(1)) {
      c.reason = "derived Holder exponent out of [1, inf]";
      return c;
    }
  c.ok = true;
  return c;
}

namespace {

double snorm_row(const std::vector<double>& Kmat, size_t m, size_t i, bool row,
                 const std::vector<double>& tau, const Rat& s) {
  if (s.is_inf()) {
    double best = 0;
    for (size_t j = 0; j < m; ++j)
      best = std::max(best, std::abs(row ? Kmat[i * m + j] : Kmat[j * m + i]));
    return best;
  }
  double sv = s.value();
  double acc = 0;
  for (size_t j = 0; j < m; ++j)
    acc += std::pow(std::abs(row ? Kmat[i * m + j] : Kmat[j * m + i]), sv) * tau[j];
  return std::pow(acc, 1.0 / sv);
}

}  // namespace

std::pair<double, double> schur_bounds(const SchurInstance& inst) {
  size_t m = inst.size();
  double A = 0, B = 0;
  for (size_t i = 0; i < m; ++i) {
    A = std::max(A, snorm_row(inst.Kmat, m, i, true, inst.tau, inst.s));
    B = std::max(B, snorm_row(inst.Kmat, m, i, false, inst.tau, inst.s));
  }
  return {A, B};
}

std::vector<double> apply_operator(const SchurInstance& inst, const std::vector<double>& f) {
  size_t m = inst.size();
  if (f.size() != m) throw ConfigError("apply_operator: f size mismatch");
  std::vector<double> out(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    double acc = 0;
    for (size_t j = 0; j < m; ++j) acc += inst.Kmat[i * m + j] * f[j] * inst.tau[j];
    out[i] = acc;
  }
  return out;
}

double lp_norm(const std::vector<double>& tau, const std::vector<double>& v, const Rat& p) {
  if (p.is_inf()) {
    double best = 0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
  }
  double pv = p.value();
  double acc = 0;
  for (size_t i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), pv) * tau[i];
  return std::pow(acc, 1.0 / pv);
}

namespace {

// Gaussian + two-sided Pareto mixture: heavy tails stress the L^q -> L^r gap
// harder than Gaussians alone.
std::vector<double> random_f(std::mt19937_64& eng, size_t m) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> f(m);
  double shape = 1.1 + 1.9 * unif(eng);
  for (size_t i = 0; i < m; ++i) {
    if (unif(eng) < 0.5)
      f[i] = gauss(eng);
    else {
      double u = std::max(unif(eng), 1e-12);
      f[i] = (unif(eng) < 0.5 ? 1.0 : -1.0) * std::pow(u, -1.0 / shape);
    }
  }
  return f;
}

}  // namespace

YoungReport verify_young_inequality(const SchurInstance& inst, uint64_t trials, uint64_t seed,
                                    int ascent_steps) {
  TripleCheck tc = check_exponent_triple(inst.s, inst.q, inst.r);
  if (!tc.ok) throw ConfigError("verify_young_inequality: bad triple: " + tc.reason);
  auto [A, B] = schur_bounds(inst);
  YoungReport rep;
  rep.trials = trials;
  rep.A_s = A;
  rep.B_s = B;
  // Interpolation weight s/r, with the limit conventions for inf exponents
  // (s = inf forces r = inf in a valid triple, where the weight is 1).
  double sr = inst.r.is_inf() ? 0.0 : (inst.s.value() / inst.r.value());
  if (inst.s.is_inf()) sr = inst.r.is_inf() ? 1.0 : 0.0;
  rep.bound_factor = std::pow(A, 1.0 - sr) * std::pow(B, sr);
  size_t m = inst.size();
  std::mt19937_64 eng(mix64(seed + 0xf00dULL));
  auto ratio_of = [&](const std::vector<double>& f) {
    double nf = lp_norm(inst.tau, f, inst.q);
    if (nf == 0) return 0.0;
    return lp_norm(inst.tau, apply_operator(inst, f), inst.r) / (rep.bound_factor * nf);
  };
  std::vector<double> best_f;
  for (uint64_t t = 0; t < trials; ++t) {
    std::vector<double> f = random_f(eng, m);
    double rt = ratio_of(f);
    if (rt > rep.max_ratio) {
      rep.max_ratio = rt;
      best_f = f;
    }
  }
  // Coordinate-ascent falsification from the best random start.
  if (ascent_steps > 0 && !best_f.empty()) {
    std::uniform_int_distribution<size_t> pick(0, m - 1);
    std::normal_distribution<double> step(0.0, 0.5);
    for (int it = 0; it < ascent_steps; ++it) {
      size_t i = pick(eng);
      double old = best_f[i];
      best_f[i] += step(eng) * (1.0 + std::abs(old));
      double rt = ratio_of(best_f);
      if (rt > rep.max_ratio)
        rep.max_ratio = rt;
      else
        best_f[i] = old;
    }
  }
  rep.pass = rep.max_ratio <= 1.0 + 1e-9;
  return rep;
}

double brute_operator_norm_2_2(const SchurInstance& inst) {
  size_t m = inst.size();
  if (m > 512) throw ConfigError("brute_operator_norm_2_2: support larger than 512");
  std::vector<double> W(m * m);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j)
      W[i * m + j] = inst.Kmat[i * m + j] * std::sqrt(inst.tau[i] * inst.tau[j]);
  std::vector<double> v(m, 1.0 / std::sqrt(double(m))), w(m), u(m);
  double sigma = 0, prev = -1;
  for (int it = 0; it < 100000; ++it) {
    for (size_t i = 0; i < m; ++i) {
      double acc = 0;
      for (size_t j = 0; j < m; ++j) acc += W[i * m + j] * v[j];
      w[i] = acc;
    }
    for (size_t j = 0; j < m; ++j) {
      double acc = 0;
      for (size_t i = 0; i < m; ++i) acc += W[i * m + j] * w[i];
      u[j] = acc;
    }
    double nu = 0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0) return 0.0;
    sigma = std::sqrt(nu);  // ||W^T W v|| -> sigma^2 at the fixed point
    for (size_t j = 0; j < m; ++j) v[j] = u[j] / nu;
    if (prev >= 0 && std::abs(sigma - prev) <= 1e-10 * std::max(1.0, sigma)) return sigma;
    prev = sigma;
  }
  throw ConfigError("brute_operator_norm_2_2: power iteration did not converge");
}

SchurInstance random_instance(uint64_t seed, size_t max_size, const Rat& s, const Rat& q,
                              const Rat& r) {
  std::mt19937_64 eng(mix64(seed * 0x9e3779b97f4a7c15ULL + 1));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<size_t> szd(2, std::max<size_t>(2, max_size));
  size_t m = szd(eng);
  int d = 1 + int(eng() % 2);
  std::vector<double> pts(m * size_t(d)), tau(m);
  for (double& x : pts) x = unif(eng);
  for (double& t : tau) t = 0.05 + unif(eng);
  int mode = int(eng() % 3);
  double scale = std::exp2(4.0 * unif(eng) - 2.0);
  double width = 0.5 + 4.0 * unif(eng);
  auto kernel = [mode, scale, width](const double* x, const double* y, int dd) {
    double d2 = 0;
    for (int a = 0; a < dd; ++a) d2 += (x[a] - y[a]) * (x[a] - y[a]);
    switch (mode) {
      case 0: return scale * std::pow(1.0 + width * width * d2, -0.75);  // bracket power
      case 1: return scale * std::exp(-width * d2);                      // Gaussian bump
      default: return scale * (1.0 + 0.5 * std::cos(width * (x[0] + y[0])));  // smooth rank-ish
    }
  };
  return SchurInstance::from_kernel(d, std::move(pts), std::move(tau), kernel, s, q, r);
}

}  // namespace frostman
