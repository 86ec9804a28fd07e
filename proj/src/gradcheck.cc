#include "reifkb/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "reifkb/errors.h"

namespace reifkb {

namespace {

long double Finite(long double v, const char* what) {
  if (!std::isfinite(v)) throw NumericsError(std::string("grad check: non-finite ") + what);
  return v;
}

}  // namespace

GradCheckReport GradCheck(ParamStore* params, const LossFn& loss, const GradCheckOptions& options) {
  params->ZeroGrad();
  Finite(loss(true), "loss");

  struct Coord {
    Parameter* param;
    const std::string* name;
    std::size_t index;
  };
  std::vector<Coord> all;
  for (auto& [name, p] : params->all())
    for (std::size_t i = 0; i < p.value.size(); ++i) all.push_back({&p, &name, i});

  std::vector<Coord> picked;
  if (all.size() <= options.samples) {
    picked = all;
  } else {
    std::mt19937_64 rng(options.seed);
    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Partial Fisher-Yates: the first `samples` positions are a uniform sample.
    for (std::size_t i = 0; i < options.samples; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
      std::swap(order[i], order[pick(rng)]);
    }
    for (std::size_t i = 0; i < options.samples; ++i) picked.push_back(all[order[i]]);
  }

  GradCheckReport report;
  for (const Coord& c : picked) {
    double& x = c.param->value.data()[c.index];
    const double analytic = c.param->grad.data()[c.index];
    const double saved = x;
    x = saved + options.eps;
    const long double plus = Finite(loss(false), "loss");
    x = saved - options.eps;
    const long double minus = Finite(loss(false), "loss");
    x = saved;
    const double numeric = static_cast<double>((plus - minus) / (2.0L * options.eps));
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic - numeric) / denom;
    ++report.checked;
    if (rel > report.max_rel_error || report.checked == 1) {
      report.max_rel_error = rel;
      report.worst_param = *c.name;
      report.worst_index = c.index;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  }
  return report;
}

}  // namespace reifkb
