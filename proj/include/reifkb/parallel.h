#ifndef REIFKB_PARALLEL_H_
#define REIFKB_PARALLEL_H_

namespace reifkb {

// Worker threads used by the OpenMP kernels. Every kernel computes each
// output element with one fixed accumulation order, so results are bitwise
// independent of this setting.
void SetNumThreads(int threads);
int NumThreads();

// True when OpenMP support was compiled in.
bool OpenMPEnabled();

}  // namespace reifkb

#endif  // REIFKB_PARALLEL_H_
