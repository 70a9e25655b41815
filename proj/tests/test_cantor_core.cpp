#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <frostman/cantor_tree.hpp>
#include <frostman/schedule.hpp>

#include <cmath>
#include <random>

using namespace frostman;

TEST_CASE("dim-epsilon schedule, hand-computed stage data") {
  // N=4, eps=0.5, d=1, K=3: N_k = (4,16,64), p_k = 4^{-k/2} = (1/2,1/4,1/8),
  // log2 delta_3 = -(2+4+6) = -12, log2 R_3 = (2+4+6)/2 = 6.
  ScaleSchedule s = build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 3);
  REQUIRE(s.Nk.size() == 3);
  CHECK(s.Nk[0] == 4);
  CHECK(s.Nk[1] == 16);
  CHECK(s.Nk[2] == 64);
  CHECK(s.pk[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.pk[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(s.pk[2] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(s.log2_delta[2] == doctest::Approx(-12.0).epsilon(1e-14));
  CHECK(s.log2_R(3) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(s.M(3) == 4ull * 16 * 64);
  CHECK(s.M(0) == 1);
}

TEST_CASE("schedule rejects p_1 > 1/2") {
  // N=2, eps=0.5: p_1 = 2^{-1/2} > 1/2.
  CHECK_THROWS_AS(build_schedule(Preset::dim_epsilon, 2, 0.5, 1, 3), ConfigError);
}

TEST_CASE("dim1 schedule has constant p_k = N^{-gamma}") {
  ScaleSchedule s = build_schedule(Preset::dim1, 8, 1.0 / 3.0, 1, 2);
  CHECK(s.pk[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.pk[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s.log2_delta[1] == doctest::Approx(-9.0).epsilon(1e-14));  // 8 * 64 = 2^9
  CHECK(s.eps_k[0] == doctest::Approx(1.0 / 3.0));
  CHECK(s.eps_k[1] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("schedule rejects parameters out of range") {
  CHECK_THROWS_AS(build_schedule(Preset::dim_epsilon, 4, 0.0, 1, 3), ConfigError);
  CHECK_THROWS_AS(build_schedule(Preset::dim_epsilon, 4, 1.0, 1, 3), ConfigError);
  CHECK_THROWS_AS(build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 0), ConfigError);
  CHECK_THROWS_AS(build_schedule(Preset::dim_epsilon, 1, 0.5, 1, 3), ConfigError);
  // M_K overflows 64 bits well before K = 12 for N = 8 (needs 2^{3K(K+1)/2}).
  CHECK_THROWS_AS(build_schedule(Preset::dim1, 8, 1.0 / 3.0, 1, 12), ConfigError);
}

TEST_CASE("anchor of a digit index, d = 1") {
  // N = (2,4), digits = (2,3): anchor = 1/2 + 2/8 = 0.75.
  ScaleSchedule s = custom_schedule(1, {2, 4});
  CubeIndex idx;
  idx.stage = 2;
  idx.d = 1;
  idx.digits = {2, 3};
  auto a = anchor(idx, s);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == doctest::Approx(0.75).epsilon(1e-15));

  auto w = flatten(idx, s);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == 6);  // 0.75 * M_2 = 0.75 * 8
  CubeIndex back = unflatten(w.data(), 2, s);
  CHECK(back.digits == idx.digits);
}

TEST_CASE("all-ones digits flatten to the origin") {
  ScaleSchedule s = custom_schedule(2, {3, 5});
  CubeIndex idx;
  idx.stage = 2;
  idx.d = 2;
  idx.digits = {1, 1, 1, 1};
  auto a = anchor(idx, s);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
  auto w = flatten(idx, s);
  CHECK(w[0] == 0);
  CHECK(w[1] == 0);
}

TEST_CASE("anchor of a d = 2 index") {
  // N = (3), digits = ((2,3)): anchor (1/3, 2/3).
  ScaleSchedule s = custom_schedule(2, {3});
  CubeIndex idx;
  idx.stage = 1;
  idx.d = 2;
  idx.digits = {2, 3};
  auto a = anchor(idx, s);
  CHECK(a[0] == doctest::Approx(1.0 / 3.0));
  CHECK(a[1] == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("refine_stage with explicit bits reproduces the two-interval pattern") {
  // N_1 = 4, keep children 1 and 4: cubes [0,1/4] and [3/4,1].
  ScaleSchedule s = custom_schedule(1, {4});
  CantorTree t = make_tree(s);
  int calls = 0;
  refine_stage(t, 1, [&](const uint64_t* w) {
    ++calls;
    return w[0] == 0 || w[0] == 3;
  });
  CHECK(calls == 4);
  CHECK(t.P[0] == 2);
  REQUIRE(t.stages[0].size() == 2);
  CHECK(t.stages[0][0] == 0);
  CHECK(t.stages[0][1] == 3);

  StageMeasure m = stage_measure(t, 1);
  CHECK(m.coord(0, 0) == 0.0);
  CHECK(m.coord(1, 0) == doctest::Approx(0.75));
  CHECK(m.weight(0) == doctest::Approx(0.5));
}

TEST_CASE("all bits kept / all bits dropped") {
  ScaleSchedule s = custom_schedule(1, {4, 3});
  CantorTree t = make_tree(s);
  refine_stage(t, 1, [](const uint64_t*) { return true; });
  refine_stage(t, 2, [](const uint64_t*) { return true; });
  CHECK(t.P[0] == 4);
  CHECK(t.P[1] == 12);
  CHECK_FALSE(t.extinct());

  CantorTree dead = make_tree(s);
  refine_stage(dead, 1, [](const uint64_t*) { return false; });
  CHECK(dead.P[0] == 0);
  CHECK(dead.extinct());
  CHECK_THROWS_AS(stage_measure(dead, 1), ConfigError);
}

TEST_CASE("full_tree of N_1 = 2 is the Lebesgue half-split") {
  ScaleSchedule s = custom_schedule(1, {2});
  CantorTree t = full_tree(s);
  StageMeasure m = stage_measure(t, 1);
  REQUIRE(m.count() == 2);
  CHECK(m.coord(0, 0) == 0.0);
  CHECK(m.coord(1, 0) == doctest::Approx(0.5));
  CHECK(m.weight(0) == doctest::Approx(0.5));
  CHECK(m.total == doctest::Approx(1.0));
}

TEST_CASE("stage words stay sorted and nested under random refinement") {
  ScaleSchedule s = custom_schedule(2, {3, 2, 4});
  std::mt19937_64 eng(99);
  CantorTree t = make_tree(s);
  for (int k = 1; k <= 3; ++k)
    refine_stage(t, k, [&](const uint64_t*) { return (eng() & 3) != 0; });
  for (int k = 1; k <= 3; ++k) {
    const auto& st = t.stages[size_t(k - 1)];
    size_t n = st.size() / 2;
    for (size_t i = 0; i + 1 < n; ++i) {
      bool less = st[2 * i] < st[2 * i + 2] ||
                  (st[2 * i] == st[2 * i + 2] && st[2 * i + 1] < st[2 * i + 3]);
      CHECK(less);
    }
  }
  // Every stage-k cube's parent word must appear at stage k-1.
  for (int k = 2; k <= 3; ++k) {
    const auto& st = t.stages[size_t(k - 1)];
    const auto& prev = t.stages[size_t(k - 2)];
    uint64_t nk = s.Nk[size_t(k - 1)];
    for (size_t i = 0; i < st.size() / 2; ++i) {
      uint64_t pa = st[2 * i] / nk, pb = st[2 * i + 1] / nk;
      bool found = false;
      for (size_t j = 0; j < prev.size() / 2; ++j)
        if (prev[2 * j] == pa && prev[2 * j + 1] == pb) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("serialize / deserialize round trip on random trees") {
  std::mt19937_64 eng(7);
  for (int trial = 0; trial < 25; ++trial) {
    int d = 1 + int(eng() % 2);
    // The d = 2 preset tree would have ~16M stage-3 cubes; keep those trials
    // on a small custom schedule.
    ScaleSchedule s = (trial % 2 == 0 && d == 1)
                          ? build_schedule(Preset::dim_epsilon, 4, 0.5, d, 3)
                          : custom_schedule(d, {3, 2, 2});
    CantorTree t = make_tree(s);
    for (int k = 1; k <= 3; ++k)
      refine_stage(t, k, [&](const uint64_t*) { return (eng() & 7) != 0; });
    std::string blob = serialize_tree(t);
    CantorTree back = deserialize_tree(blob);
    CHECK(back.stages == t.stages);
    CHECK(back.P == t.P);
    CHECK(serialize_tree(back) == blob);
  }
}

TEST_CASE("deserialize validates nesting") {
  ScaleSchedule s = custom_schedule(1, {4, 2});
  CantorTree t = make_tree(s);
  refine_stage(t, 1, [](const uint64_t* w) { return w[0] == 0; });
  refine_stage(t, 2, [](const uint64_t*) { return true; });
  std::string blob = serialize_tree(t);
  // Point a stage-2 cube at the missing parent 3.
  auto pos = blob.rfind("\"1\"");
  REQUIRE(pos != std::string::npos);
  blob.replace(pos, 3, "\"7\"");
  CHECK_THROWS_WITH_AS(deserialize_tree(blob), doctest::Contains("orphan cube at stage 2"),
                       ConfigError);
}

TEST_CASE("schedule diagnostics partial sums are finite and small for presets") {
  ScaleSchedule s = build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 6);
  CHECK(s.diagnostics.extinction_sum < 1.0);  // non-extinction summability
  CHECK(std::isfinite(s.diagnostics.log_weight_sum));
  CHECK(std::isfinite(s.diagnostics.descendant_sum));
  CHECK(std::isfinite(s.diagnostics.mass_tail_term));
}
