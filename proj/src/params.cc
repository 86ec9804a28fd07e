#include "reifkb/params.h"

#include <cmath>
#include <fstream>

#include "binio.h"
#include "reifkb/errors.h"

namespace reifkb {

namespace {

constexpr char kMagic[4] = {'R', 'K', 'C', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxNameLength = 4096;

}  // namespace

Matrix& ParamStore::Create(const std::string& name, std::size_t rows, std::size_t cols,
                           Init init, std::mt19937_64& rng) {
  if (params_.count(name)) throw ConfigError("parameter '" + name + "' already exists");
  Parameter p{Matrix(rows, cols), Matrix(rows, cols)};
  double bound = 0.0;
  switch (init) {
    case Init::kZeros: break;
    case Init::kEmbedding: bound = 0.1; break;
    case Init::kGlorot: bound = std::sqrt(6.0 / static_cast<double>(rows + cols)); break;
  }
  if (bound > 0.0) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : p.value.data()) v = u(rng);
  }
  return params_.emplace(name, std::move(p)).first->second.value;
}

Parameter& ParamStore::Get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParamStore::Get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& [name, p] : params_) p.grad.Fill(0.0);
}

void ParamStore::CopyValuesFrom(const ParamStore& other) {
  for (auto& [name, p] : params_) {
    const Parameter& src = other.Get(name);
    CheckSameShape(p.value, src.value, "ParamStore::CopyValuesFrom");
    p.value = src.value;
  }
}

void SaveCheckpoint(const ParamStore& params, const CheckpointHeader& header,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint " + path.string());
  out.write(kMagic, 4);
  binio::PutU32(out, kVersion);
  binio::PutU64(out, header.seed);
  binio::PutU64(out, header.step);
  binio::PutU64(out, params.all().size());
  for (const auto& [name, p] : params.all()) {
    binio::PutU64(out, name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    binio::PutU32(out, 2);
    binio::PutU64(out, p.value.rows());
    binio::PutU64(out, p.value.cols());
    for (double v : p.value.data()) binio::PutF64(out, v);
  }
  if (!out) throw ConfigError("failed writing checkpoint " + path.string());
}

CheckpointHeader LoadCheckpoint(ParamStore* params, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw ConfigError(path.string() + " is not a checkpoint");
  }
  if (std::uint32_t v = binio::GetU32(in, "version"); v != kVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(v));
  }
  CheckpointHeader header;
  header.seed = binio::GetU64(in, "seed");
  header.step = binio::GetU64(in, "step");
  std::uint64_t count = binio::GetU64(in, "record count");
  if (count != params->all().size()) {
    throw ConfigError("checkpoint has " + std::to_string(count) + " parameters, model has " +
                      std::to_string(params->all().size()));
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t len = binio::GetU64(in, "name length");
    if (len > kMaxNameLength) throw ConfigError("corrupt checkpoint: parameter name too long");
    std::string name(len, '\0');
    in.read(name.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::uint64_t>(in.gcount()) != len) {
      throw ConfigError("truncated binary file while reading parameter name");
    }
    if (!params->Contains(name)) throw ConfigError("checkpoint parameter '" + name + "' unknown");
    Parameter& p = params->Get(name);
    if (std::uint32_t rank = binio::GetU32(in, "rank"); rank != 2) {
      throw ConfigError("parameter '" + name + "' has rank " + std::to_string(rank));
    }
    std::uint64_t rows = binio::GetU64(in, "rows");
    std::uint64_t cols = binio::GetU64(in, "cols");
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw ConfigError("parameter '" + name + "' is " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " in the checkpoint but " +
                        p.value.ShapeString() + " in the model");
    }
    for (double& v : p.value.data()) v = binio::GetF64(in, "values");
  }
  return header;
}

}  // namespace reifkb
