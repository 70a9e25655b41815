#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frostman/errors.hpp"
#include "frostman/schedule.hpp"

namespace frostman {

// Digit-form index of a stage-k cube: digits[j-1][a] in {1..N_j} for axis a.
// The flattened form used everywhere else is one mixed-radix word per axis:
//   f_a = sum_j (digit_{j,a} - 1) * M_k / M_j,
// i.e. the numerator of the anchor coordinate over M_k. Flat words sort
// parents before their children blocks, so stage lists stay sorted by
// construction.
struct CubeIndex {
  int stage = 0;
  int d = 1;
  std::vector<uint32_t> digits;  // stride d, digits[(j-1)*d + a], 1-based values

  uint32_t digit(int j, int a) const { return digits[size_t(j - 1) * size_t(d) + size_t(a)]; }
};

// Sorts a flat stage array of stride-d records tuple-lexicographically.
void sort_stage_words(std::vector<uint64_t>& words, int d);

// Index (in records) of the stride-d tuple within a sorted stage array, or
// npos if absent.
size_t find_stage_word(const std::vector<uint64_t>& words, int d, const uint64_t* key);

// Per-axis flattened words of a cube index.
std::vector<uint64_t> flatten(const CubeIndex& idx, const ScaleSchedule& s);
CubeIndex unflatten(const uint64_t* words, int stage, const ScaleSchedule& s);

// Lower-left corner alpha(i_k) of the cube, each coordinate f_a / M_k.
std::vector<double> anchor(const CubeIndex& idx, const ScaleSchedule& s);

// Outcome of the stage-wise random selection: stage k holds the flattened
// words (stride d, lexicographically sorted) of the cubes kept so far.
// Extinct trees (some P_k = 0) are representable; measure-producing
// operations reject them.
struct CantorTree {
  ScaleSchedule schedule;
  bool pinned_origin = false;
  std::vector<std::vector<uint64_t>> stages;  // stages[k-1], stride d
  std::vector<uint64_t> P;                    // P[k-1] = stage-k cube count

  int depth() const { return int(stages.size()); }
  bool extinct() const {
    for (uint64_t p : P)
      if (p == 0) return true;
    return false;
  }
  uint64_t count(int k) const { return k == 0 ? 1 : P.at(size_t(k - 1)); }
};

CantorTree make_tree(const ScaleSchedule& schedule);

// Populates stage k (must be depth+1) with the children of surviving
// stage-(k-1) cubes whose selection bit is 1. The selection callable gets the
// child's flattened words (stride d).
template <class Selection>
void refine_stage(CantorTree& tree, int k, Selection&& selected) {
  const ScaleSchedule& s = tree.schedule;
  if (k != tree.depth() + 1 || k > s.K)
    throw ConfigError("refine_stage: stage " + std::to_string(k) + " is not next (depth " +
                      std::to_string(tree.depth()) + ", K " + std::to_string(s.K) + ")");
  const int d = s.d;
  const uint64_t nk = s.Nk[size_t(k - 1)];
  std::vector<uint64_t> out;
  std::vector<uint64_t> child(static_cast<size_t>(d));
  const std::vector<uint64_t> root(1, 0);  // stage-0 "cube" is the unit cube
  const std::vector<uint64_t>& parents = (k == 1) ? root : tree.stages[size_t(k - 2)];
  size_t np = (k == 1) ? 1 : parents.size() / size_t(d);
  for (size_t pi = 0; pi < np; ++pi) {
    const uint64_t* pw = (k == 1) ? root.data() : &parents[pi * size_t(d)];
    // Odometer over the N_k^d children in lexicographic order.
    std::vector<uint64_t> off(size_t(d), 0);
    while (true) {
      for (int a = 0; a < d; ++a) child[size_t(a)] = (k == 1 ? 0 : pw[a]) * nk + off[size_t(a)];
      if (selected(child.data())) out.insert(out.end(), child.begin(), child.end());
      int a = d - 1;
      while (a >= 0 && ++off[size_t(a)] == nk) {
        off[size_t(a)] = 0;
        --a;
      }
      if (a < 0) break;
    }
  }
  // Parent-major generation order coincides with tuple-lexicographic order
  // only when d = 1; re-sort the stride-d records otherwise so binary
  // searches over stages stay valid.
  if (d > 1) sort_stage_words(out, d);
  tree.stages.push_back(std::move(out));
  tree.P.push_back(tree.stages.back().size() / size_t(d));
}

// Fully refined tree (every child kept) through stage K; P_k = prod N_j^d.
CantorTree full_tree(const ScaleSchedule& schedule);

// Atomized stage measure: one atom per surviving cube at the cube's anchor.
// weights empty means uniform 1/P (the normalized-indicator measure mu_k);
// mass_distribution_measure fills non-uniform weights and a total < 1.
struct StageMeasure {
  int d = 1;
  int stage = 0;
  double log2_delta = 0;
  uint64_t M = 1;                // denominator of anchors at this stage
  uint64_t P = 0;
  std::vector<uint64_t> atoms;   // flat words, stride d, sorted
  std::vector<double> weights;   // empty => uniform 1/P
  double total = 1.0;

  size_t count() const { return size_t(P); }
  double weight(size_t i) const { return weights.empty() ? 1.0 / double(P) : weights[i]; }
  double coord(size_t i, int a) const {
    return double(atoms[i * size_t(d) + size_t(a)]) / double(M);
  }
};

// mu_k = normalized Lebesgue on the stage-k union, atomized at anchors.
StageMeasure stage_measure(const CantorTree& tree, int k);

// JSON round-trip. Validates nesting on read; orphan cubes are an error.
std::string serialize_tree(const CantorTree& tree);
CantorTree deserialize_tree(const std::string& bytes);

}  // namespace frostman
