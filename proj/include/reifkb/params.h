#ifndef REIFKB_PARAMS_H_
#define REIFKB_PARAMS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reifkb/dense.h"

namespace reifkb {

enum class Init {
  kZeros,
  kEmbedding,  // uniform(-0.1, 0.1)
  kGlorot,     // uniform(-b, b), b = sqrt(6 / (fan_in + fan_out))
};

struct Parameter {
  Matrix value;
  Matrix grad;
};

// Named trainable tensors. Iteration order is the lexicographic name order,
// which fixes the order of optimizer updates and checkpoint records.
class ParamStore {
 public:
  // Creates a parameter; ConfigError if the name exists.
  Matrix& Create(const std::string& name, std::size_t rows, std::size_t cols, Init init,
                 std::mt19937_64& rng);

  bool Contains(const std::string& name) const { return params_.count(name) > 0; }
  // LookupError for unknown names.
  Parameter& Get(const std::string& name);
  const Parameter& Get(const std::string& name) const;

  std::map<std::string, Parameter>& all() { return params_; }
  const std::map<std::string, Parameter>& all() const { return params_; }
  std::size_t num_scalars() const;

  void ZeroGrad();
  // Copies values (not grads) from a store with identical names and shapes.
  void CopyValuesFrom(const ParamStore& other);

 private:
  std::map<std::string, Parameter> params_;
};

struct CheckpointHeader {
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
};

// Checkpoint: magic "RKCP", u32 version, u64 seed, u64 step, u64 record
// count, then per parameter: u64 name length, name bytes, u32 rank (2), u64
// dims, row-major little-endian f64 values.
void SaveCheckpoint(const ParamStore& params, const CheckpointHeader& header,
                    const std::filesystem::path& path);
// Loads into an existing store; every record must match a parameter of the
// same shape (ConfigError otherwise).
CheckpointHeader LoadCheckpoint(ParamStore* params, const std::filesystem::path& path);

}  // namespace reifkb

#endif  // REIFKB_PARAMS_H_
