#include "frostman/measure_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "frostman/fit.hpp"
#include "frostman/parallel.hpp"
#include "frostman/rng.hpp"

namespace frostman {

namespace {

// Overlap of [lo, hi] with cell [f, f+1], all in cell units.
inline long double cell_overlap(long double lo, long double hi, uint64_t f) {
  long double a = std::max<long double>(lo, (long double)f);
  long double b = std::min<long double>(hi, (long double)f + 1.0L);
  return b > a ? b - a : 0.0L;
}

}  // namespace

double ball_mass(const StageMeasure& m, const BallQuery& q) {
  if (int(q.center.size()) != m.d) throw ConfigError("ball_mass: center dimension mismatch");
  long double r = std::exp2((long double)q.log2_radius);
  if (!(r > 0)) throw ConfigError("ball_mass: radius must be positive");
  long double M = (long double)m.M;

  if (m.d == 1 && m.weights.empty()) {
    // Occupied cells are sorted; only the two boundary cells are partial.
    long double lo = std::max<long double>(0.0L, ((long double)q.center[0] - r)) * M;
    long double hi = std::min<long double>(1.0L, ((long double)q.center[0] + r)) * M;
    if (hi <= lo) return 0.0;
    uint64_t a = uint64_t(std::max<long double>(0.0L, std::floor(lo)));
    uint64_t b = uint64_t(std::max<long double>(0.0L, std::floor(std::min(hi, M - 0.5L))));
    auto beg = m.atoms.begin(), end = m.atoms.end();
    if (a == b) {
      bool present = std::binary_search(beg, end, a);
      return present ? double(cell_overlap(lo, hi, a)) / double(m.P) : 0.0;
    }
    auto it_lo = std::lower_bound(beg, end, a);
    auto it_hi = std::lower_bound(beg, end, b);
    long double sum = 0.0L;
    // fully covered cells strictly between the two boundary cells
    auto it_in = (it_lo != end && *it_lo == a) ? it_lo + 1 : it_lo;
    sum += (long double)std::distance(it_in, it_hi);
    if (it_lo != end && *it_lo == a) sum += cell_overlap(lo, hi, a);
    if (it_hi != end && *it_hi == b) sum += cell_overlap(lo, hi, b);
    return double(sum / (long double)m.P);
  }

  size_t n = m.count();
  size_t d = size_t(m.d);
  std::vector<long double> lo(d), hi(d);
  for (size_t a = 0; a < d; ++a) {
    lo[a] = std::max<long double>(0.0L, (long double)q.center[a] - r) * M;
    hi[a] = std::min<long double>(1.0L, (long double)q.center[a] + r) * M;
  }
  return det_block_sum(n, [&](size_t i) {
    long double prod = 1.0L;
    for (size_t a = 0; a < d; ++a) {
      prod *= cell_overlap(lo[a], hi[a], m.atoms[i * d + a]);
      if (prod == 0.0L) return 0.0;
    }
    return double(prod) * m.weight(i);
  });
}

namespace {

// Stage whose cells are at least as large as r: the largest l with
// r <= delta_l (delta_0 = 1).
int matching_stage(const ScaleSchedule& s, double log2_r) {
  int l = 0;
  while (l < s.K && log2_r <= s.log2_delta[size_t(l)]) ++l;
  return l;
}

std::vector<std::vector<double>> random_centers(int d, int n, uint64_t seed) {
  std::vector<std::vector<double>> out;
  CounterRng rng(seed, 0, 0x5eed);
  for (int i = 0; i < n; ++i) {
    std::vector<double> c(static_cast<size_t>(d));
    for (int a = 0; a < d; ++a)
      c[size_t(a)] = std::ldexp(double(rng.word(uint64_t(i) * 64 + uint64_t(a))), -64);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

BallProfile upper_ball_profile(const CantorTree& tree, int meas_stage,
                               const std::vector<double>& log2_radii, double alpha, double R,
                               int n_random, uint64_t seed) {
  StageMeasure m = stage_measure(tree, meas_stage);
  const ScaleSchedule& s = tree.schedule;
  size_t d = size_t(s.d);
  auto rnd = random_centers(s.d, n_random, seed);

  BallProfile prof;
  prof.upper = true;
  prof.alpha = alpha;
  std::vector<double> xs, ys;          // sqrt(ln 1/r), ln sup-mass/r^alpha
  std::vector<ProfileSample> raw;
  for (double l2r : log2_radii) {
    if (l2r < m.log2_delta) {
      ++prof.rejected_radii;
      continue;
    }
    int lstar = std::min(matching_stage(s, l2r), meas_stage);
    // Anchor centers from the matching coarse stage (subsampled if huge).
    static const std::vector<uint64_t> none;
    const std::vector<uint64_t>& anchors = lstar == 0 ? none : tree.stages[size_t(lstar - 1)];
    size_t na = lstar == 0 ? 0 : anchors.size() / d;
    size_t stride = std::max<size_t>(1, na / 8192);
    double Ml = double(s.M(lstar));
    double best = -1;
    long long best_id = -1;
    BallQuery q;
    q.log2_radius = l2r;
    q.center.assign(d, 0.0);
    for (size_t i = 0; i < na; i += stride) {
      for (size_t a = 0; a < d; ++a) q.center[a] = double(anchors[i * d + a]) / Ml;
      double v = ball_mass(m, q);
      if (v > best) {
        best = v;
        best_id = (long long)i;
      }
    }
    if (lstar == 0) {
      q.center.assign(d, 0.0);
      double v = ball_mass(m, q);
      if (v > best) {
        best = v;
        best_id = 0;
      }
    }
    for (size_t i = 0; i < rnd.size(); ++i) {
      q.center = rnd[i];
      double v = ball_mass(m, q);
      if (v > best) {
        best = v;
        best_id = -1 - (long long)i;
      }
    }
    ProfileSample smp;
    smp.center_id = best_id;
    smp.log2_r = l2r;
    smp.mass = best;
    raw.push_back(smp);
    xs.push_back(std::sqrt(std::max(0.0, -l2r * std::log(2.0))));
    ys.push_back(std::log(std::max(best, 1e-300)) - alpha * l2r * std::log(2.0));
  }
  if (raw.empty()) throw ConfigError("upper_ball_profile: no admissible radii");
  if (R < 0) R = min_range_shift(xs, ys).first;
  prof.R = R;
  prof.sup_ratio = -1.0 / 0.0;
  prof.inf_ratio = 1.0 / 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    raw[i].ratio = std::exp(ys[i] - R * xs[i]);
    prof.sup_ratio = std::max(prof.sup_ratio, raw[i].ratio);
    prof.inf_ratio = std::min(prof.inf_ratio, raw[i].ratio);
  }
  prof.samples = std::move(raw);
  return prof;
}

namespace {

// Locates the stage-K cell of the tree containing v0 (or touching it within
// one cell). Returns the atom index or throws.
size_t locate_point(const CantorTree& tree, int k, const std::vector<double>& v0) {
  const ScaleSchedule& s = tree.schedule;
  size_t d = size_t(s.d);
  const auto& st = tree.stages[size_t(k - 1)];
  size_t n = st.size() / d;
  double M = double(s.M(k));
  uint64_t Mi = s.M(k);
  std::vector<uint64_t> fl(d);
  for (size_t a = 0; a < d; ++a) {
    double x = v0[a] * M;
    if (x < -1 || x > M + 1) throw ConfigError("lower_ball_profile: v0 outside unit cube");
    fl[a] = uint64_t(std::clamp(x, 0.0, double(Mi - 1)));
  }
  // Check the containing cell and its immediate neighbors (v0 may sit on a
  // cell boundary).
  auto present = [&](const std::vector<uint64_t>& w) -> long long {
    size_t lo = 0, hi = n;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      auto base = st.begin() + long(mid * d);
      if (std::lexicographical_compare(base, base + long(d), w.begin(), w.end()))
        lo = mid + 1;
      else if (std::equal(w.begin(), w.end(), base))
        return (long long)mid;
      else
        hi = mid;
    }
    return -1;
  };
  std::vector<uint64_t> w(d);
  int combos = 1;
  for (size_t a = 0; a < d; ++a) combos *= 3;
  for (int c = 0; c < combos; ++c) {
    int cc = c;
    bool valid = true;
    for (size_t a = 0; a < d; ++a) {
      int off = cc % 3 - 1;
      cc /= 3;
      long long f = (long long)fl[a] + off;
      if (f < 0 || f >= (long long)Mi) {
        valid = false;
        break;
      }
      w[a] = uint64_t(f);
    }
    if (!valid) continue;
    // Require v0 within one cell of the candidate in every axis.
    bool close = true;
    for (size_t a = 0; a < d && close; ++a)
      close = std::abs(v0[a] - double(w[a]) / M) <= 2.0 / M;
    if (!close) continue;
    long long idx = present(w);
    if (idx >= 0) return size_t(idx);
  }
  throw ConfigError("lower_ball_profile: v0 is not within resolution of the stage-" +
                    std::to_string(k) + " set");
}

}  // namespace

BallProfile lower_ball_profile(const CantorTree& tree, int meas_stage,
                               const std::vector<double>& v0,
                               const std::vector<double>& log2_radii, double alpha, double R) {
  StageMeasure m = stage_measure(tree, meas_stage);
  const ScaleSchedule& s = tree.schedule;
  size_t d = size_t(s.d);
  int K = tree.depth();
  size_t vK = locate_point(tree, K, v0);

  BallProfile prof;
  prof.upper = false;
  prof.alpha = alpha;
  std::vector<double> xs, ys;
  std::vector<ProfileSample> raw;
  std::vector<double> floors;
  for (double l2r : log2_radii) {
    if (l2r < m.log2_delta) {
      ++prof.rejected_radii;
      continue;
    }
    BallQuery q;
    q.center = v0;
    q.log2_radius = l2r;
    double mass = ball_mass(m, q);
    ProfileSample smp;
    smp.center_id = 0;
    smp.log2_r = l2r;
    smp.mass = mass;
    raw.push_back(smp);
    xs.push_back(std::sqrt(std::max(0.0, -l2r * std::log(2.0))));
    ys.push_back(std::log(std::max(mass, 1e-300)) - alpha * l2r * std::log(2.0));

    // Guaranteed floor: the stage-(l*+2) cube around v0 sits inside the ball
    // once its sidelength is below r; its stage-K descendant count bounds the
    // ball mass from below.
    int l = std::min(matching_stage(s, l2r) + 2, meas_stage);
    if (s.log2_delta[size_t(l - 1)] <= l2r && meas_stage == K) {
      uint64_t D = s.M(K) / s.M(l);
      std::vector<uint64_t> anc(d);
      for (size_t a = 0; a < d; ++a) anc[a] = tree.stages[size_t(K - 1)][vK * d + a] / D;
      // count stage-K entries under anc
      uint64_t qcount = 0;
      const auto& st = tree.stages[size_t(K - 1)];
      if (d == 1) {
        auto lo = std::lower_bound(st.begin(), st.end(), anc[0] * D);
        auto hi = std::lower_bound(st.begin(), st.end(), (anc[0] + 1) * D);
        qcount = uint64_t(std::distance(lo, hi));
      } else {
        for (size_t i = 0; i < st.size() / d; ++i) {
          bool under = true;
          for (size_t a = 0; a < d && under; ++a) under = st[i * d + a] / D == anc[a];
          if (under) ++qcount;
        }
      }
      floors.push_back(double(qcount) / double(tree.count(K)));
    } else {
      floors.push_back(0.0);
    }
  }
  if (raw.empty()) throw ConfigError("lower_ball_profile: no admissible radii");
  if (R < 0) {
    // value = mass * Phi_R / r^alpha: minimizing log-range of y + R x.
    std::vector<double> neg(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) neg[i] = -xs[i];
    R = min_range_shift(neg, ys).first;
  }
  prof.R = R;
  prof.sup_ratio = -1.0 / 0.0;
  prof.inf_ratio = 1.0 / 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    raw[i].ratio = std::exp(ys[i] + R * xs[i]);
    prof.sup_ratio = std::max(prof.sup_ratio, raw[i].ratio);
    prof.inf_ratio = std::min(prof.inf_ratio, raw[i].ratio);
    if (floors[i] > 0)
      prof.floor_values.push_back(std::exp(std::log(floors[i]) - prof.alpha * raw[i].log2_r * std::log(2.0) +
                                           R * xs[i]));
  }
  prof.samples = std::move(raw);
  return prof;
}

DimensionEstimate dimension_estimate(const ScaleSchedule& s, const std::vector<uint64_t>& P) {
  if (P.size() < 3) throw ConfigError("dimension_estimate: need K >= 3");
  DimensionEstimate est;
  std::vector<double> xu, yu, xl, yl;
  for (size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0) throw ConfigError("dimension_estimate: extinct stage");
    int k = int(i) + 1;
    double u = std::log2(double(P[i])) / (-s.log2_delta[i]);
    est.upper_seq.push_back(u);
    xu.push_back(1.0 / double(k + 1));
    yu.push_back(u);
    if (k >= 2) {
      double num = std::log2(double(P[i])) - double(s.d) * std::log2(double(s.Nk[i]));
      double low = num / (-s.log2_delta[i - 1]);
      est.lower_seq.push_back(low);
      xl.push_back(1.0 / double(k - 1));
      yl.push_back(low);
    }
  }
  LineFit fu = least_squares(xu, yu);
  LineFit fl = least_squares(xl, yl);
  est.estimate = fu.intercept;
  est.lower_estimate = fl.intercept;
  est.max_residual = fu.max_residual;
  if (s.preset == Preset::dim_epsilon)
    est.reference = double(s.d) * (1.0 - s.shape);
  else if (s.preset == Preset::dim1)
    est.reference = double(s.d);
  else
    est.reference = std::nan("");
  return est;
}

DimensionEstimate dimension_estimate(const CantorTree& tree) {
  return dimension_estimate(tree.schedule, tree.P);
}

double weak_star_gap(const CantorTree& tree, int k, int k_prime) {
  if (!(1 <= k && k <= k_prime && k_prime <= tree.depth()))
    throw ConfigError("weak_star_gap: need 1 <= k <= k' <= depth");
  if (tree.count(k) == 0 || tree.count(k_prime) == 0)
    throw ConfigError("weak_star_gap: extinct stage");
  if (k == k_prime) return 0.0;
  DescendantReport rep = descendant_counts(tree, k, k_prime);
  double Pk = double(tree.count(k)), Pp = double(tree.count(k_prime));
  double gap = 0;
  for (uint64_t q : rep.q) gap += std::abs(double(q) / Pp - 1.0 / Pk);
  return gap;
}

double slow_growth_phi(double R, double t) {
  if (t < 1.0) throw ConfigError("slow_growth_phi: t must be >= 1");
  if (R < 0.0) throw ConfigError("slow_growth_phi: R must be >= 0");
  return std::exp(R * std::sqrt(std::log(t)));
}

StageMeasure mass_distribution_measure(const CantorTree& tree) {
  if (tree.depth() == 0 || tree.extinct())
    throw ConfigError("mass_distribution_measure: extinct tree");
  const ScaleSchedule& s = tree.schedule;
  size_t d = size_t(s.d);
  int K = tree.depth();
  std::vector<double> w_prev{1.0};  // stage-0: unit mass on the root cube
  for (int k = 1; k <= K; ++k) {
    const auto& st = tree.stages[size_t(k - 1)];
    static const std::vector<uint64_t> root_words{0};
    const auto& prev = k == 1 ? root_words : tree.stages[size_t(k - 2)];
    size_t pn = k == 1 ? 1 : prev.size() / d;
    size_t n = st.size() / d;
    uint64_t nk = s.Nk[size_t(k - 1)];
    std::vector<uint64_t> nchild(pn, 0);
    std::vector<size_t> parent_of(n);
    std::vector<uint64_t> anc(d);
    for (size_t i = 0; i < n; ++i) {
      size_t pi = 0;
      if (k > 1) {
        for (size_t a = 0; a < d; ++a) anc[a] = st[i * d + a] / nk;
        pi = find_stage_word(prev, int(d), anc.data());
        if (pi == size_t(-1)) throw ConfigError("mass_distribution_measure: orphan cube");
      }
      parent_of[i] = pi;
      ++nchild[pi];
    }
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) w[i] = w_prev[parent_of[i]] / double(nchild[parent_of[i]]);
    w_prev = std::move(w);
  }
  StageMeasure m = stage_measure(tree, K);
  m.weights = std::move(w_prev);
  double tot = 0;
  for (double w : m.weights) tot += w;
  m.total = tot;
  return m;
}

}  // namespace frostman
