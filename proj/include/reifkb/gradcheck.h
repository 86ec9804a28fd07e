#ifndef REIFKB_GRADCHECK_H_
#define REIFKB_GRADCHECK_H_

#include <cstdint>
#include <functional>
#include <string>

#include "reifkb/params.h"

namespace reifkb {

struct GradCheckOptions {
  double eps = 1e-6;
  std::size_t samples = 200;  // coordinates sampled across all parameters
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Evaluates the scalar loss at the current parameter values; called with
// record_grads = true once to obtain analytic gradients (it must leave them
// in the store's grad buffers), then repeatedly with false for the central
// differences; the difference is taken in long double. Relative error is |a - f| / max(|a|, |f|, 1e-8). When the
// parameters have no more scalars than `samples`, every coordinate is checked.
using LossFn = std::function<long double(bool record_grads)>;

// NumericsError if the loss is not finite.
GradCheckReport GradCheck(ParamStore* params, const LossFn& loss, const GradCheckOptions& options);

}  // namespace reifkb

#endif  // REIFKB_GRADCHECK_H_
