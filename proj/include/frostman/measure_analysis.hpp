#pragma once

#include <cstdint>
#include <vector>

#include "frostman/cantor_tree.hpp"
#include "frostman/random_cantor.hpp"

namespace frostman {

// Axis-aligned (l-infinity) ball; radius 2^log2_radius. The construction's
// own covering arguments reduce round balls to such cubes with a dimensional
// constant, and the sandwich mass(r/sqrt(d)) <= round-ball mass <= mass(r)
// brackets the difference.
struct BallQuery {
  std::vector<double> center;
  double log2_radius = 0;
};

// Exact stage mass of the ball: per-axis overlap of [c-r, c+r] with each
// occupied cell, divided by the cell volume, times the atom weight. Uniform
// d = 1 measures take an O(log P) bisection path; everything else sums over
// atoms with compensated arithmetic.
double ball_mass(const StageMeasure& measure, const BallQuery& q);

struct ProfileSample {
  long long center_id = -1;  // >= 0: stage-anchor index; -1-i: i-th random center
  double log2_r = 0;
  double mass = 0;
  double ratio = 0;  // mass/(r^a Phi_R(1/r)) (upper) or mass Phi_R(1/r)/r^a (lower)
};

struct BallProfile {
  bool upper = true;
  double alpha = 0;
  double R = 0;             // fitted or supplied Phi constant
  std::vector<ProfileSample> samples;  // one extremal sample per admitted radius
  double sup_ratio = 0;     // over samples (upper direction)
  double inf_ratio = 0;     // over samples (lower direction)
  std::vector<double> floor_values;    // lower only: guaranteed sub-cube mass ratio
  int rejected_radii = 0;   // radii finer than the stage resolution
};

// Upper Frostman profile: for each radius, the sup of normalized ball mass
// over all anchors of the matching coarse stage (delta_{l*+1} < r <= delta_{l*})
// plus n_random uniform centers. R < 0 means fit R by minimizing the
// log-range of the profile.
BallProfile upper_ball_profile(const CantorTree& tree, int meas_stage,
                               const std::vector<double>& log2_radii, double alpha, double R,
                               int n_random = 32, uint64_t seed = 0);

// Lower profile at a fixed point v0 of E (checked to lie in a surviving
// stage-K cube). Also reports, per radius, the guaranteed floor from the
// stage-(l*+2) cube around v0 that the ball fully contains.
BallProfile lower_ball_profile(const CantorTree& tree, int meas_stage,
                               const std::vector<double>& v0,
                               const std::vector<double>& log2_radii, double alpha, double R);

struct DimensionEstimate {
  std::vector<double> upper_seq;  // k = 1..K: log P_k / (-log delta_k)
  std::vector<double> lower_seq;  // k = 2..K: log(P_k/N_k^d) / (-log delta_{k-1})
  double estimate = 0;            // intercept of upper_seq extrapolated in 1/(k+1)
  double lower_estimate = 0;      // intercept of lower_seq extrapolated in 1/(k-1)
  double max_residual = 0;
  double reference = 0;           // d(1-eps) or d for the presets
};

DimensionEstimate dimension_estimate(const CantorTree& tree);
DimensionEstimate dimension_estimate(const ScaleSchedule& schedule,
                                     const std::vector<uint64_t>& P);

// sum over stage-k cubes of |mu_{k'}(Q) - mu_k(Q)| = |q_{k'}/P_{k'} - 1/P_k|.
double weak_star_gap(const CantorTree& tree, int k, int k_prime);

// Phi_R(t) = exp(R sqrt(log t)), the slow-growth correction.
double slow_growth_phi(double R, double t);

// The alternative "mass distribution" measure: each parent's mass is split
// equally among its selected children, so dead-end branches lose mass and the
// total can drop below 1.
StageMeasure mass_distribution_measure(const CantorTree& tree);

}  // namespace frostman
