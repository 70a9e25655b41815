#include "frostman/random_cantor.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frostman/parallel.hpp"
#include "frostman/rng.hpp"

namespace frostman {

namespace {

// One selection stage. d == 1 takes a single-word hash in a tight loop and is
// chunked over parents; chunks are concatenated in order, so the result is
// identical to the serial pass.
void grow_stage(CantorTree& t, int k, const CounterRng& rng, uint64_t thr, bool pin) {
  const ScaleSchedule& s = t.schedule;
  if (s.d == 1) {
    const uint64_t nk = s.Nk[size_t(k - 1)];
    static const std::vector<uint64_t> root{0};
    const std::vector<uint64_t>& parents = (k == 1) ? root : t.stages[size_t(k - 2)];
    size_t np = parents.size();
    int nchunks = std::max(1, std::min(int(np), worker_count() * 4));
    std::vector<std::vector<uint64_t>> chunk_out(static_cast<size_t>(nchunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int c = 0; c < nchunks; ++c) {
      size_t lo = np * size_t(c) / size_t(nchunks);
      size_t hi = np * size_t(c + 1) / size_t(nchunks);
      std::vector<uint64_t>& out = chunk_out[size_t(c)];
      for (size_t pi = lo; pi < hi; ++pi) {
        uint64_t base = parents[pi] * nk;
        for (uint64_t o = 0; o < nk; ++o) {
          uint64_t w = base + o;
          if ((pin && w == 0) || rng.bernoulli(w, thr)) out.push_back(w);
        }
      }
    }
    std::vector<uint64_t> out;
    size_t total = 0;
    for (const auto& co : chunk_out) total += co.size();
    out.reserve(total);
    for (const auto& co : chunk_out) out.insert(out.end(), co.begin(), co.end());
    t.stages.push_back(std::move(out));
    t.P.push_back(t.stages.back().size());
    return;
  }
  const int d = s.d;
  refine_stage(t, k, [&](const uint64_t* w) {
    if (pin) {
      bool zero = true;
      for (int a = 0; a < d; ++a) zero &= (w[a] == 0);
      if (zero) return true;
    }
    return rng.bernoulli(w, d, thr);
  });
}

}  // namespace

CantorTree grow_conditioned(const GrowthConfig& config) {
  const ScaleSchedule& s = config.schedule;
  uint64_t extinct_rounds = 0;
  for (int round = 0; round < config.max_rejections; ++round) {
    CantorTree t = make_tree(s);
    t.pinned_origin = config.pin_origin;
    bool alive = true;
    for (int k = 1; k <= s.K; ++k) {
      CounterRng rng(config.master_seed, uint64_t(round), uint64_t(k));
      grow_stage(t, k, rng, CounterRng::threshold(s.pk[size_t(k - 1)]), config.pin_origin);
      if (t.P.back() == 0) {
        alive = false;
        ++extinct_rounds;
        break;
      }
    }
    if (alive) return t;
  }
  throw GrowthError("grow_conditioned: extinct in all " + std::to_string(config.max_rejections) +
                        " rejection rounds",
                    extinct_rounds);
}

double bernstein_threshold(double Pbar, int k, double B) {
  double lg = std::log(double(k + 1));
  return B * std::sqrt(lg) * std::sqrt(std::max(Pbar, lg));
}

CountReport count_statistics(const ScaleSchedule& schedule, const std::vector<uint64_t>& P) {
  CountReport rep;
  double prev = 1.0;
  for (size_t i = 0; i < P.size(); ++i) {
    int k = int(i) + 1;
    CountRow row;
    row.k = k;
    row.P = P[i];
    double nkd = std::pow(double(schedule.Nk[i]), double(schedule.d));
    row.Pbar = schedule.pk[i] * nkd * prev;
    row.log2_R = schedule.log2_Rk[i];
    row.ratio = std::exp2(std::log2(std::max<double>(double(P[i]), 0.5)) - row.log2_R);
    if (P[i] == 0) row.ratio = 0;
    row.eta = (double(P[i]) - row.Pbar) / row.Pbar;
    row.t_flag = std::abs(double(P[i]) - row.Pbar) > bernstein_threshold(row.Pbar, k);
    rep.rows.push_back(row);
    prev = double(P[i]);
  }
  return rep;
}

CountReport count_statistics(const CantorTree& tree) {
  return count_statistics(tree.schedule, tree.P);
}

DescendantReport descendant_counts(const CantorTree& tree, int r, int l) {
  if (!(1 <= r && r < l && l <= tree.depth()))
    throw ConfigError("descendant_counts: need 1 <= r < l <= depth");
  const ScaleSchedule& s = tree.schedule;
  size_t d = size_t(s.d);
  uint64_t D = s.M(l) / s.M(r);
  const auto& rs = tree.stages[size_t(r - 1)];
  const auto& ls = tree.stages[size_t(l - 1)];
  size_t nr = rs.size() / d, nl = ls.size() / d;
  DescendantReport rep;
  rep.r = r;
  rep.l = l;
  rep.q.assign(nr, 0);
  // Descendant order does not make ancestors monotone for d > 1, so look
  // each ancestor up in the sorted stage-r array.
  std::vector<uint64_t> anc(d);
  for (size_t li = 0; li < nl; ++li) {
    for (size_t a = 0; a < d; ++a) anc[a] = ls[li * d + a] / D;
    size_t ri = find_stage_word(rs, int(d), anc.data());
    if (ri == size_t(-1))
      throw ConfigError("descendant_counts: orphan cube at stage " + std::to_string(l));
    ++rep.q[ri];
  }
  rep.max_q = 0;
  rep.min_surviving_q = ~0ULL;
  for (uint64_t q : rep.q) {
    rep.max_q = std::max(rep.max_q, q);
    if (q > 0) rep.min_surviving_q = std::min(rep.min_surviving_q, q);
  }
  if (rep.min_surviving_q == ~0ULL) rep.min_surviving_q = 0;
  double lp = 0;
  for (int m = r + 1; m <= l; ++m) lp += std::log2(s.pk[size_t(m - 1)]);
  rep.log2_cap = double(s.d) * (s.log2_delta[size_t(r - 1)] - s.log2_delta[size_t(l - 1)]) + lp;
  return rep;
}

std::vector<double> surviving_branch(const CantorTree& tree) {
  if (tree.depth() == 0 || tree.extinct())
    throw ConfigError("surviving_branch: tree is extinct or empty");
  const ScaleSchedule& s = tree.schedule;
  int K = tree.depth();
  std::vector<double> x(size_t(s.d));
  double m = double(s.M(K));
  for (int a = 0; a < s.d; ++a) x[size_t(a)] = double(tree.stages[size_t(K - 1)][size_t(a)]) / m;
  return x;
}

namespace {

uint64_t binomial_draw(std::mt19937_64& eng, uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  // libstdc++'s rejection sampler stops terminating once n*p overflows the
  // integer range of double, so fall back to the normal approximation; with
  // variance > 1e6 the approximation error is far below sampling noise.
  double var = double(n) * p * (1.0 - p);
  if (var > 1e6) {
    std::normal_distribution<double> gauss(double(n) * p, std::sqrt(var));
    double x = std::round(gauss(eng));
    if (x < 0) x = 0;
    if (x > double(n)) x = double(n);
    return uint64_t(x);
  }
  std::binomial_distribution<long long> bin((long long)n, p);
  return uint64_t(bin(eng));
}

}  // namespace

CountChain simulate_count_chain(const ScaleSchedule& s, uint64_t seed) {
  std::mt19937_64 eng(mix64(seed + kGolden));
  CountChain c;
  uint64_t prev = 1;
  for (int k = 1; k <= s.K; ++k) {
    double nkd_log2 = double(s.d) * std::log2(double(s.Nk[size_t(k - 1)]));
    if (std::log2(double(std::max<uint64_t>(prev, 1))) + nkd_log2 > 62)
      throw ConfigError("simulate_count_chain: candidate count overflows 64-bit at stage " +
                        std::to_string(k));
    uint64_t nkd = 1;
    for (int a = 0; a < s.d; ++a) nkd *= s.Nk[size_t(k - 1)];
    uint64_t n = prev * nkd;
    uint64_t pk_count = binomial_draw(eng, n, s.pk[size_t(k - 1)]);
    c.P.push_back(pk_count);
    if (pk_count == 0) {
      c.extinct = true;
      // pad remaining stages with zeros
      for (int j = k + 1; j <= s.K; ++j) c.P.push_back(0);
      break;
    }
    prev = pk_count;
  }
  return c;
}

CountChain simulate_count_chain_conditioned(const ScaleSchedule& s, uint64_t seed,
                                            int max_rejections) {
  for (int round = 0; round < max_rejections; ++round) {
    CountChain c = simulate_count_chain(s, mix64(seed) + uint64_t(round));
    if (!c.extinct) return c;
  }
  throw GrowthError("simulate_count_chain_conditioned: extinct in all rounds",
                    uint64_t(max_rejections));
}

ExtinctionReport extinction_probability(const ScaleSchedule& s, uint64_t trials, uint64_t seed) {
  if (trials < 1) throw ConfigError("extinction_probability: trials must be >= 1");
  ExtinctionReport rep;
  rep.trials = trials;
  uint64_t extinct = 0;
  for (uint64_t t = 0; t < trials; ++t)
    if (simulate_count_chain(s, mix64(seed + kGolden * 7) + t).extinct) ++extinct;
  rep.extinct = extinct;
  rep.empirical = double(extinct) / double(trials);
  double se = std::sqrt(std::max(rep.empirical * (1 - rep.empirical), 1e-12) / double(trials));
  rep.ci_low = std::max(0.0, rep.empirical - 1.96 * se);
  rep.ci_high = std::min(1.0, rep.empirical + 1.96 * se);
  for (int k = 1; k <= s.K; ++k) {
    double nkd = std::pow(double(s.Nk[size_t(k - 1)]), double(s.d));
    rep.bound_partial_sum += std::exp(nkd * std::log1p(-s.pk[size_t(k - 1)]));
  }
  return rep;
}

}  // namespace frostman
