#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <frostman/measure_analysis.hpp>
#include <frostman/fit.hpp>

#include <algorithm>
#include <cmath>

using namespace frostman;

static CantorTree figure_step1_tree() {
  // N_1 = 4, keep intervals 1 and 4: atoms {0, 0.75}, delta_1 = 1/4.
  ScaleSchedule s = custom_schedule(1, {4});
  CantorTree t = make_tree(s);
  refine_stage(t, 1, [](const uint64_t* w) { return w[0] == 0 || w[0] == 3; });
  return t;
}

TEST_CASE("radius-1 ball swallows the unit cube") {
  for (int d : {1, 2}) {
    CantorTree f = full_tree(custom_schedule(d, {3, 2}));
    StageMeasure m = stage_measure(f, 2);
    BallQuery q{std::vector<double>(size_t(d), 0.31), 0.0};
    CHECK(ball_mass(m, q) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("two-interval measure, hand-computed ball mass") {
  // Ball [0.2, 0.8] meets [0, 1/4] on [0.2, 0.25] and [3/4, 1] on [0.75, 0.8]:
  // mass = (0.05 + 0.05) / (2 * 0.25) = 0.2.
  StageMeasure m = stage_measure(figure_step1_tree(), 1);
  BallQuery q{{0.5}, std::log2(0.3)};
  CHECK(ball_mass(m, q) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("anchor query at cell scale dominates 1/P") {
  CantorTree t = grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 4), 3, false, 1000});
  StageMeasure m = stage_measure(t, 4);
  for (size_t i = 0; i < std::min<size_t>(m.count(), 10); ++i) {
    BallQuery q{{m.coord(i, 0)}, m.log2_delta};
    CHECK(ball_mass(m, q) >= 1.0 / double(m.P) - 1e-12);
  }
}

TEST_CASE("d=1 uniform fast path agrees with the generic atom sum") {
  CantorTree t = grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 4), 8, false, 1000});
  StageMeasure uni = stage_measure(t, 4);
  // Force the generic path with explicit (equal) weights.
  StageMeasure gen = uni;
  gen.weights.assign(gen.count(), 1.0 / double(gen.P));
  for (double c : {0.0, 0.111, 0.25, 0.5, 0.77, 0.999}) {
    for (double l2r : {-1.5, -3.0, -5.25, -7.0}) {
      BallQuery q{{c}, l2r};
      CHECK(ball_mass(uni, q) == doctest::Approx(ball_mass(gen, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("ball mass is monotone in radius") {
  CantorTree t = grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 4), 5, false, 1000});
  StageMeasure m = stage_measure(t, 4);
  for (double c : {0.1, 0.5, 0.9}) {
    double prev = 0;
    for (double l2r = -8.0; l2r <= 0.0; l2r += 0.5) {
      double v = ball_mass(m, {{c}, l2r});
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("two-radius sandwich brackets the round ball") {
  // mass(r/sqrt(d)) <= round-ball mass <= mass(r); at d = 1 both ends equal.
  CantorTree f = full_tree(custom_schedule(2, {3, 3}));
  StageMeasure m = stage_measure(f, 2);
  for (double l2r : {-1.0, -2.0, -3.0}) {
    double lo = ball_mass(m, {{0.4, 0.6}, l2r - 0.5 * std::log2(2.0)});
    double hi = ball_mass(m, {{0.4, 0.6}, l2r});
    CHECK(lo <= hi + 1e-15);
  }
}

TEST_CASE("Lebesgue upper profile is flat and bounded by the volume factor") {
  CantorTree f = full_tree(custom_schedule(1, {4, 4, 4}));
  std::vector<double> radii;
  for (double l2r = -5.0; l2r <= -1.0; l2r += 0.5) radii.push_back(l2r);
  BallProfile prof = upper_ball_profile(f, 3, radii, 1.0, 0.0, 8, 1);
  CHECK(prof.sup_ratio <= 2.0 + 1e-9);  // (2r)^d / r^alpha at alpha = d = 1
  CHECK(prof.sup_ratio / prof.inf_ratio <= 2.0 + 1e-9);
}

TEST_CASE("random K=6 measure: fitted profile stable over three decades") {
  CantorTree t = grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 6), 2, true, 1000});
  std::vector<double> radii;
  for (double l2r = -10.0; l2r <= -0.5; l2r += 0.5) radii.push_back(l2r);
  BallProfile up = upper_ball_profile(t, 6, radii, 0.5, -1.0, 32, 2);
  CHECK(up.R >= 0.0);
  CHECK(up.sup_ratio / up.inf_ratio <= 4.0);

  SUBCASE("misspecified alpha makes the ratio drift at a detectable slope") {
    BallProfile bad = upper_ball_profile(t, 6, radii, 0.7, 0.0, 32, 2);
    std::vector<double> xs, ys;
    for (const auto& smp : bad.samples) {
      xs.push_back(-smp.log2_r);              // log(1/r)
      ys.push_back(std::log2(smp.ratio));
    }
    LineFit f = least_squares(xs, ys);
    CHECK(f.slope == doctest::Approx(0.2).epsilon(0.5));  // alpha - d(1-eps) = 0.2
    CHECK(f.slope > 0.1);
  }
}

TEST_CASE("lower profile: Lebesgue floor and the pinned random tree") {
  SUBCASE("uniform measure, interior point") {
    CantorTree f = full_tree(custom_schedule(1, {4, 4, 4}));
    std::vector<double> radii{-6.0, -5.0, -4.0, -3.0};
    BallProfile lo = lower_ball_profile(f, 3, {0.5}, radii, 1.0, 0.0);
    CHECK(lo.inf_ratio >= 1.0 - 1e-12);
  }

  SUBCASE("pinned tree at the origin, r in [delta_5, delta_2]") {
    CantorTree t =
        grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 6), 6, true, 1000});
    std::vector<double> radii;
    for (double l2r = -30.0; l2r <= -6.0; l2r += 1.5) radii.push_back(l2r);
    BallProfile lo = lower_ball_profile(t, 6, {0.0}, radii, 0.5, -1.0);
    CHECK(lo.inf_ratio > 0.0);
    CHECK(lo.sup_ratio / lo.inf_ratio <= 8.0);
  }

  SUBCASE("a point outside every surviving cube is rejected") {
    CantorTree t = make_tree(custom_schedule(1, {4, 4}));
    refine_stage(t, 1, [](const uint64_t* w) { return w[0] == 0; });
    refine_stage(t, 2, [](const uint64_t* w) { return w[0] == 0; });
    CHECK_THROWS_AS(lower_ball_profile(t, 2, {0.999}, {-5.0}, 0.5, 0.0), ConfigError);
  }
}

TEST_CASE("dimension estimate is exact on full trees") {
  for (int d : {1, 2}) {
    CantorTree f = full_tree(custom_schedule(d, {3, 4, 2}));
    DimensionEstimate est = dimension_estimate(f);
    for (double u : est.upper_seq) CHECK(u == doctest::Approx(double(d)).epsilon(1e-12));
    CHECK(est.estimate == doctest::Approx(double(d)).epsilon(1e-9));
  }
}

TEST_CASE("count-vector overload agrees with the tree path") {
  CantorTree t = grow_conditioned({build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 5), 13, false, 1000});
  DimensionEstimate a = dimension_estimate(t);
  DimensionEstimate b = dimension_estimate(t.schedule, t.P);
  CHECK(a.estimate == doctest::Approx(b.estimate).epsilon(1e-12));
  CHECK(a.upper_seq == b.upper_seq);
}

TEST_CASE("weak-star gap laws") {
  ScaleSchedule s = build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 5);
  CantorTree t = grow_conditioned({s, 21, false, 1000});
  CHECK(weak_star_gap(t, 3, 3) == 0.0);
  CantorTree f = full_tree(build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 3));
  CHECK(weak_star_gap(f, 1, 3) == doctest::Approx(0.0).epsilon(1e-12));

  // Cross-check against descendant_counts.
  double gap = weak_star_gap(t, 2, 5);
  DescendantReport rep = descendant_counts(t, 2, 5);
  double manual = 0;
  for (uint64_t q : rep.q)
    manual += std::abs(double(q) / double(t.P[4]) - 1.0 / double(t.P[1]));
  CHECK(gap == doctest::Approx(manual).epsilon(1e-12));
}

TEST_CASE("slow growth correction") {
  CHECK(slow_growth_phi(0.0, 100.0) == 1.0);
  CHECK(slow_growth_phi(1.0, std::exp(1.0)) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(slow_growth_phi(-1.0, 10.0), ConfigError);
  CHECK_THROWS_AS(slow_growth_phi(1.0, 0.5), ConfigError);

  // Phi_R(t) t^-kappa decreasing for t >= exp((R/2kappa)^2), kappa=0.1, R=2.
  double R = 2.0, kappa = 0.1;
  double t0 = std::exp(std::pow(R / (2 * kappa), 2));
  double prev = slow_growth_phi(R, t0) * std::pow(t0, -kappa);
  for (double f = 1.5; f <= 100.0; f *= 1.5) {
    double t = t0 * f;
    double v = slow_growth_phi(R, t) * std::pow(t, -kappa);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("mass distribution measure") {
  SUBCASE("equal child counts reproduce the uniform stage measure") {
    CantorTree t = make_tree(custom_schedule(1, {4, 4}));
    refine_stage(t, 1, [](const uint64_t* w) { return w[0] % 2 == 0; });
    refine_stage(t, 2, [](const uint64_t* w) { return w[0] % 2 == 1; });  // 2 children each
    StageMeasure tilde = mass_distribution_measure(t);
    CHECK(tilde.total == doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 0; i < tilde.count(); ++i)
      CHECK(tilde.weight(i) == doctest::Approx(1.0 / double(tilde.P)).epsilon(1e-12));
  }

  SUBCASE("half-interval construction concentrates mass 1/2 on the right branch") {
    // N_k = 2 everywhere. Stage 1 keeps both halves; the left half keeps a
    // full tree below it (Lebesgue on [0,1/2], mass 1/2), while the right
    // half funnels its mass down its leftmost chain, one cell per stage at
    // anchor 1/2 carrying mass 1/2 (the half-Dirac pattern in the limit).
    int K = 5;
    ScaleSchedule s = custom_schedule(1, std::vector<uint64_t>(size_t(K), 2));
    CantorTree t = make_tree(s);
    refine_stage(t, 1, [](const uint64_t*) { return true; });
    for (int k = 2; k <= K; ++k) {
      uint64_t mid = 1ULL << (k - 1);  // anchor numerator of the cube at 1/2
      refine_stage(t, k, [&](const uint64_t* w) { return w[0] < mid || w[0] == mid; });
    }
    StageMeasure tilde = mass_distribution_measure(t);
    CHECK(tilde.total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tilde.count() == (size_t(1) << (K - 1)) + 1);
    // Atoms are sorted; the last one sits at 1/2 with the funnelled mass.
    size_t last = tilde.count() - 1;
    CHECK(tilde.coord(last, 0) == doctest::Approx(0.5));
    CHECK(tilde.weight(last) == doctest::Approx(0.5).epsilon(1e-12));
    // The left-half cells carry plain Lebesgue weights.
    CHECK(tilde.weight(0) == doctest::Approx(std::exp2(-double(K))).epsilon(1e-12));
  }

  SUBCASE("extinct sub-branches lose mass") {
    CantorTree t = make_tree(custom_schedule(1, {2, 2}));
    refine_stage(t, 1, [](const uint64_t*) { return true; });
    refine_stage(t, 2, [](const uint64_t* w) { return w[0] < 2; });  // right parent dies
    StageMeasure tilde = mass_distribution_measure(t);
    CHECK(tilde.total == doctest::Approx(0.5).epsilon(1e-12));
  }
}
