#include "reifkb/parallel.h"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reifkb {

void SetNumThreads(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

int NumThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

bool OpenMPEnabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace reifkb
