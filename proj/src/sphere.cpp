#include "frostman/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "frostman/parallel.hpp"

namespace frostman {

double legendre_P(int l, double x) {
  if (l < 0) throw ConfigError("legendre_P: l must be >= 0");
  if (std::abs(x) > 1.0 + 1e-12) throw ConfigError("legendre_P: |x| > 1");
  x = std::clamp(x, -1.0, 1.0);
  if (l == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int j = 1; j < l; ++j) {
    double next = ((2.0 * j + 1.0) * x * p - double(j) * pm1) / double(j + 1);
    pm1 = p;
    p = next;
  }
  return p;
}

double zonal_value(int l, double theta) {
  return std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI)) * legendre_P(l, std::cos(theta));
}

namespace {

// Adaptive Simpson on [a,b]. The error budget tol is absolute and halves with
// each split; a per-panel relative test stalls on integrands that are near
// zero over most of the interval (sin^l for large l).
template <class F>
double adsimp(const F& f, double a, double m, double b, double fa, double fm, double fb,
              double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adsimp(f, a, lm, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
         adsimp(f, m, rm, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double eps) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Anchor the absolute budget at a crude scale of the integral.
  double scale = std::max({std::abs(whole), (b - a) * std::abs(fm), 1e-30});
  return adsimp(f, a, m, b, fa, fm, fb, whole, eps * scale, 48);
}

}  // namespace

double highest_weight_c(int l) {
  if (l < 0) throw ConfigError("highest_weight_c: l must be >= 0");
  static std::map<int, double> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(l);
    if (it != cache.end()) return it->second;
  }
  // ||c sin^l||_2^2 = 2 pi c^2 int_0^pi sin(theta)^(2l+1) dtheta = 1.
  double I = integrate([l](double th) { return std::pow(std::sin(th), 2 * l + 1); }, 0.0, M_PI,
                       1e-12);
  double c = 1.0 / std::sqrt(2.0 * M_PI * I);
  std::lock_guard<std::mutex> lock(mu);
  cache[l] = c;
  return c;
}

double highest_weight_value(int l, double theta) {
  return highest_weight_c(l) * std::pow(std::sin(theta), l);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ConfigError("gauss_legendre: n must be >= 1");
  nodes.resize(size_t(n));
  weights.resize(size_t(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p = legendre_P(n, x);
      double pm = legendre_P(n - 1, x);
      pp = double(n) * (x * p - pm) / (x * x - 1.0);
      double dx = p / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[size_t(i)] = -x;
    nodes[size_t(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[size_t(i)] = w;
    weights[size_t(n - 1 - i)] = w;
  }
}

double zonal_l2_quadrature(int l) {
  std::vector<double> x, w;
  gauss_legendre(l + 2, x, w);
  double acc = 0, c = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double pl = legendre_P(l, x[i]);
    detail::kahan_add(w[i] * pl * pl, acc, c);
  }
  return 2.0 * M_PI * (2.0 * l + 1.0) / (4.0 * M_PI) * acc;
}

ArcMeasure make_arc(const StageMeasure& base, double L, ArcKind kind) {
  if (base.d != 1) throw ConfigError("make_arc: base measure must live on [0,1]");
  if (!(L > 0 && L <= M_PI)) throw ConfigError("make_arc: arc length must lie in (0, pi]");
  ArcMeasure arc;
  arc.kind = kind;
  arc.L = L;
  arc.log2_delta = base.log2_delta;
  size_t n = base.count();
  arc.theta.resize(n);
  arc.w.resize(n);
  for (size_t i = 0; i < n; ++i) {
    arc.theta[i] = kind == ArcKind::meridian ? L * base.coord(i, 0) : 0.5 * M_PI;
    arc.w[i] = base.weight(i);
  }
  return arc;
}

ArcMeasure lebesgue_arc(int n, double L, ArcKind kind) {
  if (n < 1) throw ConfigError("lebesgue_arc: n must be >= 1");
  ArcMeasure arc;
  arc.kind = kind;
  arc.L = L;
  arc.log2_delta = -std::log2(double(n));
  arc.theta.resize(size_t(n));
  arc.w.assign(size_t(n), 1.0 / double(n));
  for (int i = 0; i < n; ++i) {
    double v = double(i) / double(n);  // includes the pole at v = 0
    arc.theta[size_t(i)] = kind == ArcKind::meridian ? L * v : 0.5 * M_PI;
  }
  return arc;
}

double restriction_norm(HarmonicKind kind, int l, const ArcMeasure& arc, double p) {
  if (!(p >= 1.0)) throw ConfigError("restriction_norm: p must be >= 1 (or infinite)");
  auto phi = [&](size_t i) {
    return kind == HarmonicKind::zonal ? std::abs(zonal_value(l, arc.theta[i]))
                                       : highest_weight_value(l, arc.theta[i]);
  };
  if (kind == HarmonicKind::highest_weight) highest_weight_c(l);  // warm cache outside the loop
  if (std::isinf(p)) {
    double best = 0;
    for (size_t i = 0; i < arc.theta.size(); ++i) best = std::max(best, phi(i));
    return best;
  }
  double acc = det_block_sum(arc.theta.size(),
                             [&](size_t i) { return arc.w[i] * std::pow(phi(i), p); });
  return std::pow(acc, 1.0 / p);
}

RestrictionFit fit_restriction_exponent(HarmonicKind kind, const ArcMeasure& arc, double p,
                                        const std::vector<int>& ls) {
  if (ls.size() < 5) throw ConfigError("fit_restriction_exponent: need >= 5 degrees");
  int lmax = *std::max_element(ls.begin(), ls.end());
  if (double(lmax) * std::exp2(arc.log2_delta) * arc.L > std::exp2(-4.0))
    throw ResolutionError("fit_restriction_exponent: l_max " + std::to_string(lmax) +
                          " exceeds the arc's atomization resolution");
  RestrictionFit out;
  std::vector<double> ys;
  for (int l : ls) {
    double nrm = restriction_norm(kind, l, arc, p);
    out.log2_l.push_back(std::log2(double(l)));
    out.log2_norm.push_back(std::log2(std::max(nrm, 1e-300)));
    ys.push_back(out.log2_norm.back());
  }
  out.fit = least_squares(out.log2_l, ys);
  return out;
}

ExponentRow exponent_table(int n, int d, const Rat& epsilon, const Rat& p) {
  if (n < 2 || d < 1 || d > n) throw ConfigError("exponent_table: need n >= 2, 1 <= d <= n");
  if (epsilon < Rat(0) || epsilon >= Rat(1)) throw ConfigError("exponent_table: epsilon in [0,1)");
  if (!p.is_inf() && p < Rat(2)) throw ConfigError("exponent_table: p must be >= 2");
  ExponentRow row;
  row.n = n;
  row.d = d;
  row.epsilon = epsilon;
  row.p = p;
  Rat t = p.recip();  // 1/p, 0 for p = inf
  Rat nm1(n - 1);
  Rat alpha = Rat(d) * (Rat(1) - epsilon);
  row.p0 = Rat(4) * alpha / nm1;
  row.p_star = row.p0;  // alpha = d(1-eps) identifies the two kinks
  std::string br;

  // Full-sphere growth exponent, kink at p = 2(n+1)/(n-1).
  Rat t_sogge = Rat(n - 1, 2 * (n + 1));
  if (t <= t_sogge) {
    row.sogge = nm1 / Rat(2) - Rat(n) * t;
    br += "sogge:large";
  } else {
    row.sogge = nm1 / Rat(4) - nm1 / Rat(2) * t;
    br += "sogge:small";
  }

  // Submanifold restriction exponent.
  if (d == n) {
    row.bgt = row.sogge;  // restriction to the whole manifold
    br += ";bgt:full";
  } else if (d == n - 1) {
    Rat t_bgt = Rat(n - 1, 2 * n);
    if (t <= t_bgt) {
      row.bgt = nm1 / Rat(2) - nm1 * t;
      br += ";bgt:large";
    } else {
      row.bgt = nm1 / Rat(4) - Rat(n - 2, 2) * t;
      br += ";bgt:small";
    }
  } else {
    row.bgt = nm1 / Rat(2) - Rat(d) * t;
    br += (d == n - 2 && p == Rat(2)) ? ";bgt:low-dim(log point)" : ";bgt:low-dim";
  }

  // Cantor-measure exponents: theta (kink p0) and vartheta (kink max(2, p*)).
  Rat large = nm1 / Rat(2) - alpha * t;
  if (row.p0 > Rat(2) && p < row.p0) {
    row.theta = nm1 / Rat(4);
    br += ";theta:small";
  } else {
    row.theta = large;
    br += ";theta:large";
  }
  if (row.p_star > Rat(2) && p < row.p_star) {
    row.vartheta = nm1 / Rat(4);
    br += ";vartheta:small";
  } else {
    row.vartheta = large;
    br += ";vartheta:large";
  }
  row.kappa = large;  // alpha(2/p* - 1/p) = (n-1)/2 - alpha/p
  row.branches = br;
  return row;
}

}  // namespace frostman
