#ifndef REIFKB_OP_COUNTS_H_
#define REIFKB_OP_COUNTS_H_

#include <algorithm>
#include <cstddef>

namespace reifkb {

// Exact tallies of the kernel calls made by one follow invocation, in the
// cost model of the three following strategies.
struct OpCounts {
  std::size_t sp_dense_matmuls = 0;
  std::size_t dense_add_or_hadamard = 0;
  std::size_t sparse_adds = 0;
  // Largest number of dense floats live at once (inputs, outputs, temporaries).
  std::size_t peak_dense_floats = 0;

  void Reset() { *this = OpCounts{}; }
  void NotePeak(std::size_t floats) { peak_dense_floats = std::max(peak_dense_floats, floats); }

  OpCounts& operator+=(const OpCounts& o) {
    sp_dense_matmuls += o.sp_dense_matmuls;
    dense_add_or_hadamard += o.dense_add_or_hadamard;
    sparse_adds += o.sparse_adds;
    peak_dense_floats = std::max(peak_dense_floats, o.peak_dense_floats);
    return *this;
  }
  bool operator==(const OpCounts&) const = default;
};

}  // namespace reifkb

#endif  // REIFKB_OP_COUNTS_H_
