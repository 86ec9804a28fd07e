#ifndef REIFKB_OPTIM_H_
#define REIFKB_OPTIM_H_

#include <cstdint>
#include <map>
#include <string>

#include "reifkb/params.h"

namespace reifkb {

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Rescale the gradient when its global L2 norm exceeds this; 0 disables.
  double clip_norm = 0.0;
};

// Applies one update from the gradients held in a ParamStore. Parameters
// are visited in name order. A non-finite gradient aborts the step before
// any parameter changes and raises NumericsError.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {}) : config_(config) {}

  void Step(ParamStore* params);

  std::uint64_t step_count() const { return step_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  struct Moments {
    Matrix m;
    Matrix v;
  };

  OptimizerConfig config_;
  std::uint64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

}  // namespace reifkb

#endif  // REIFKB_OPTIM_H_
