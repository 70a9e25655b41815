#pragma once

#include <cstdint>
#include <vector>

#include "frostman/cantor_tree.hpp"
#include "frostman/schedule.hpp"

namespace frostman {

struct GrowthConfig {
  ScaleSchedule schedule;
  uint64_t master_seed = 0;
  bool pin_origin = false;
  int max_rejections = 1000;
};

// Thrown when every rejection round went extinct before stage K.
struct GrowthError : std::runtime_error {
  uint64_t extinct_rounds;
  GrowthError(const std::string& msg, uint64_t rounds)
      : std::runtime_error(msg), extinct_rounds(rounds) {}
};

// Grows a tree conditioned on non-extinction through stage K by rejection:
// the whole selection is redrawn (new rejection round) until every stage has
// P_k >= 1. Each child's Bernoulli(p_k) bit is a pure function of
// (master_seed, round, k, flattened child words), so the tree is identical
// for any worker count or traversal order. pin_origin forces the all-ones
// digit branch (flat word 0) to survive every stage.
CantorTree grow_conditioned(const GrowthConfig& config);

struct CountRow {
  int k = 0;
  uint64_t P = 0;
  double Pbar = 0;       // p_k N_k^d P_{k-1}
  double log2_R = 0;
  double ratio = 0;      // P_k / R_k
  double eta = 0;        // (P_k - Pbar_k)/Pbar_k
  bool t_flag = false;   // |P_k - Pbar_k| > t_k (Bernstein gate, B = 5)
};

struct CountReport {
  std::vector<CountRow> rows;
};

// Bernstein deviation threshold t_k = B sqrt(log(k+1)) max(Pbar, log(k+1))^(1/2).
double bernstein_threshold(double Pbar, int k, double B = 5.0);

CountReport count_statistics(const CantorTree& tree);
// Same statistics straight from a stage-count vector (P[0] = P_1, ...), for
// count-law simulations where the tree itself is too large to enumerate.
CountReport count_statistics(const ScaleSchedule& schedule, const std::vector<uint64_t>& P);

struct DescendantReport {
  int r = 0, l = 0;
  std::vector<uint64_t> q;   // aligned with the stage-r entries of the tree
  uint64_t max_q = 0;
  uint64_t min_surviving_q = 0;  // min over branches that reach stage l (q > 0)
  double log2_cap = 0;           // log2 of (delta_r/delta_l)^d prod_{m=r+1}^l p_m
};

// q_l[i_r]: number of stage-l cubes descended from each surviving stage-r cube.
DescendantReport descendant_counts(const CantorTree& tree, int r, int l);

// Anchor of the lexicographically smallest stage-K cube (the origin for
// pinned trees): a point within delta_k of E_k for every k.
std::vector<double> surviving_branch(const CantorTree& tree);

// The per-stage count law (P_k | P_{k-1} ~ Binomial(P_{k-1} N_k^d, p_k)),
// simulated without materializing cubes. Distributionally exact for any
// statistic that depends on counts alone.
struct CountChain {
  std::vector<uint64_t> P;
  bool extinct = false;
};
CountChain simulate_count_chain(const ScaleSchedule& schedule, uint64_t seed);
// Rejection-conditioned version (all P_k >= 1).
CountChain simulate_count_chain_conditioned(const ScaleSchedule& schedule, uint64_t seed,
                                            int max_rejections = 100000);

struct ExtinctionReport {
  uint64_t trials = 0;
  uint64_t extinct = 0;
  double empirical = 0;
  double ci_low = 0, ci_high = 0;  // 95% normal-approximation interval
  double bound_partial_sum = 0;    // sum_{k<=K} (1-p_k)^(N_k^d)
};

ExtinctionReport extinction_probability(const ScaleSchedule& schedule, uint64_t trials,
                                        uint64_t seed);

}  // namespace frostman
