#include "frostman/parallel.hpp"

#include <cstdlib>
#include <string>

namespace frostman {

namespace {
int env_cap() {
  const char* v = std::getenv("FROSTMAN_THREADS");
  if (!v) return 0;
  try {
    int n = std::stoi(v);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}
}  // namespace

int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  int cap = env_cap();
  return cap > 0 ? std::min(n, cap) : n;
#else
  return 1;
#endif
}

void apply_thread_cap() {
#ifdef _OPENMP
  int cap = env_cap();
  if (cap > 0) omp_set_num_threads(cap);
#endif
}

}  // namespace frostman
