#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frostman/cantor_tree.hpp"
#include "frostman/fit.hpp"
#include "frostman/rational.hpp"

namespace frostman {

// Legendre polynomial by the stable upward three-term recurrence.
double legendre_P(int l, double x);

// L2(S^2)-normalized zonal harmonic sqrt((2l+1)/4pi) P_l(cos theta).
double zonal_value(int l, double theta);

// Modulus of the L2-normalized highest-weight harmonic c_l (sin theta)^l;
// c_l comes from adaptive quadrature of the normalization integral (cached).
double highest_weight_value(int l, double theta);
double highest_weight_c(int l);

// Gauss-Legendre nodes/weights on [-1, 1] (exact for degree <= 2n-1).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Quadrature of |Y_l|^2 over the sphere; should return 1.
double zonal_l2_quadrature(int l);

enum class ArcKind { meridian, equatorial };
enum class HarmonicKind { zonal, highest_weight };

// A measure on a great-circle arc: atoms of a [0,1] stage measure mapped to
// polar angle theta = L v (meridian through the pole) or pinned to the
// equator theta = pi/2 (where only the arc's mass profile along longitude
// matters; the harmonics used there depend on theta alone).
struct ArcMeasure {
  ArcKind kind = ArcKind::meridian;
  double L = 1.0;             // arc length, <= pi
  double log2_delta = 0;      // base-measure cell size (resolution gate)
  std::vector<double> theta;  // polar angle per atom
  std::vector<double> w;      // weights, summing to the base total
};

ArcMeasure make_arc(const StageMeasure& base, double L, ArcKind kind);
// Uniform n-atom Lebesgue arc (no Cantor structure).
ArcMeasure lebesgue_arc(int n, double L, ArcKind kind);

// (sum_i w_i |phi_l(theta_i)|^p)^(1/p); p = inf -> max over atoms.
double restriction_norm(HarmonicKind kind, int l, const ArcMeasure& arc, double p);

struct RestrictionFit {
  LineFit fit;
  std::vector<double> log2_l;
  std::vector<double> log2_norm;
};

// Slope of log2 restriction_norm vs log2 l. Gate: l_max * delta * L <= 2^-4
// (atomized arc resolves the harmonic's oscillation scale).
RestrictionFit fit_restriction_exponent(HarmonicKind kind, const ArcMeasure& arc, double p,
                                        const std::vector<int>& ls);

// Exact-rational exponent calculator for the restriction estimates.
struct ExponentRow {
  int n = 2, d = 1;
  Rat epsilon, p;
  Rat sogge;      // full-sphere L^p growth exponent
  Rat bgt;        // submanifold restriction exponent, dimension d
  Rat theta;      // Cantor-measure upper exponent
  Rat vartheta;   // ball-condition upper exponent with alpha = d(1-eps)
  Rat kappa;      // sharp lower exponent, alpha(2/p* - 1/p)
  Rat p0;         // kink of theta
  Rat p_star;     // kink of vartheta/kappa
  std::string branches;  // which branch each piecewise formula used
};

ExponentRow exponent_table(int n, int d, const Rat& epsilon, const Rat& p);

}  // namespace frostman
