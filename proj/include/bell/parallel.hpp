#pragma once

#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bell {

// Thread budget for the OpenMP kernels: BELL_LAB_THREADS caps it, otherwise
// the OpenMP default (all available cores) is used.
inline int max_threads() {
  static const int n = [] {
    if (const char* env = std::getenv("BELL_LAB_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
  }();
  return n;
}

}  // namespace bell
