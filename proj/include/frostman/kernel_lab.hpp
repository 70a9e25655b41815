#pragma once

#include <cstdint>
#include <vector>

#include "frostman/cantor_tree.hpp"
#include "frostman/fit.hpp"

namespace frostman {

struct KernelParams {
  int n = 2;          // ambient manifold dimension (exponent p(n-1)/4)
  double p = 2;       // Lebesgue exponent, > 0
  double lambda = 1;  // frequency, >= 1
  double alpha = 1;   // ball-growth exponent of the measure
};

// <x> = sqrt(1 + x^2).
double japanese_bracket(double x);

// A(u, lambda; p) = sum_atoms w * <lambda |u - v|>^(-p(n-1)/4), Euclidean
// distance. Serial reference and deterministic block-parallel versions agree
// bitwise is not guaranteed between each other, but each is deterministic.
double frak_A_serial(const StageMeasure& m, const std::vector<double>& u, const KernelParams& kp);
double frak_A(const StageMeasure& m, const std::vector<double>& u, const KernelParams& kp);

// Contributions split over the dyadic shells U_j = {2^-j-1 <= |u-v| <= 2^-j}
// with the innermost shell {|u-v| <= 1/lambda}; sums exactly to frak_A.
// shells[j] for j = 0..j0; j0 = innermost.
std::vector<double> frak_A_shells(const StageMeasure& m, const std::vector<double>& u,
                                  const KernelParams& kp);

// Max of frak_A over all atoms plus extra_random uniform centers.
double sup_frak_A(const StageMeasure& m, const KernelParams& kp, int extra_random = 10,
                  uint64_t seed = 0);

double critical_p_star(double alpha, int n);
// beta_p = p(n-1)/4 below p*, alpha above (= min of the two).
double beta_target(double p, int n, double alpha);

struct DecayFit {
  LineFit fit;
  std::vector<double> log2_lambda;
  std::vector<double> log2_sup;
  double target = 0;       // -beta_p
  bool log_corrected = false;
};

// Fits log2 sup_frak_A against log2 lambda; at p = p* one log(lambda) factor
// is divided out first. Lambda values above 2^(-log2 delta_K - 4) are a
// resolution error (atomization too coarse).
DecayFit fit_decay_exponent(const StageMeasure& m, int n, double p, double alpha,
                            const std::vector<double>& log2_lambdas, int extra_random = 10,
                            uint64_t seed = 0);

}  // namespace frostman
