// Timing comparison of the serial reference kernel sums against the
// OpenMP-parallel versions. Not a test: prints a table and exits 0.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "frostman/kernel_lab.hpp"
#include "frostman/parallel.hpp"
#include "frostman/random_cantor.hpp"

using namespace frostman;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main() {
  apply_thread_cap();
  std::printf("workers: %d\n", worker_count());

  ScaleSchedule sched = build_schedule(Preset::dim_epsilon, 4, 0.5, 1, 6);
  CantorTree tree = grow_conditioned({sched, 0, false, 1000});

  std::printf("%-8s %8s %12s %12s %9s %12s\n", "stage", "atoms", "serial_s", "parallel_s",
              "speedup", "rel_diff");
  for (int stage : {3, 4, 5}) {
    StageMeasure m = stage_measure(tree, stage);
    KernelParams kp{2, 8.0, 256.0, 0.5};
    // Cap the center count so the O(centers * atoms) scan stays a benchmark,
    // not a batch job, at the finer stages.
    size_t centers = std::min<size_t>(m.count(), 2048);

    double t0 = now_s();
    double s_serial = 0;
    std::vector<double> u(1);
    for (size_t i = 0; i < centers; ++i) {
      u[0] = m.coord(i, 0);
      s_serial = std::max(s_serial, frak_A_serial(m, u, kp));
    }
    double t1 = now_s();
    double s_par = 0;
    for (size_t i = 0; i < centers; ++i) {
      u[0] = m.coord(i, 0);
      s_par = std::max(s_par, frak_A(m, u, kp));
    }
    double t2 = now_s();

    double rel = std::abs(s_par - s_serial) / s_serial;
    std::printf("%-8d %8zu %12.3f %12.3f %8.2fx %12.2e\n", stage, m.count(), t1 - t0, t2 - t1,
                (t1 - t0) / std::max(t2 - t1, 1e-9), rel);
  }
  return 0;
}
