#include "reifkb/optim.h"

#include <cmath>

#include "reifkb/errors.h"

namespace reifkb {

void Optimizer::Step(ParamStore* params) {
  double sq = 0.0;
  for (const auto& [name, p] : params->all()) {
    if (!AllFinite(p.grad)) {
      throw NumericsError("non-finite gradient for parameter '" + name + "'; step aborted");
    }
    for (double g : p.grad.data()) sq += g * g;
  }
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = std::sqrt(sq);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }
  ++step_;
  if (config_.kind == OptimizerConfig::Kind::kSgd) {
    for (auto& [name, p] : params->all()) {
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        p.value.data()[i] -= config_.lr * scale * p.grad.data()[i];
      }
    }
    return;
  }
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (auto& [name, p] : params->all()) {
    auto [it, inserted] = moments_.try_emplace(name);
    Moments& mo = it->second;
    if (inserted) {
      mo.m = Matrix(p.value.rows(), p.value.cols());
      mo.v = Matrix(p.value.rows(), p.value.cols());
    }
    CheckSameShape(mo.m, p.value, "Adam moments");
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = scale * p.grad.data()[i];
      double& m = mo.m.data()[i];
      double& v = mo.v.data()[i];
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g * g;
      p.value.data()[i] -= config_.lr * (m / c1) / (std::sqrt(v / c2) + config_.eps);
    }
  }
}

}  // namespace reifkb
