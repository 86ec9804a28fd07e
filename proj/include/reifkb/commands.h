#ifndef REIFKB_COMMANDS_H_
#define REIFKB_COMMANDS_H_

// Library form of the command-line verbs. Each command writes its outputs
// under `GlobalOptions::out` and returns a process exit code; library
// errors propagate as exceptions and ExitCodeFor maps them.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "reifkb/bench.h"
#include "reifkb/models.h"
#include "reifkb/synth.h"
#include "reifkb/train.h"

namespace reifkb {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitUsage = 2,
  kExitNumerics = 3,
};

// NumericsError -> 3; every other library error and bad input -> 2.
int ExitCodeFor(const std::exception& e);

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  int threads = 1;
  std::uint64_t mem_budget_bytes = std::uint64_t{2} << 30;
};

// "2G", "512M", "64K" or a plain byte count. ConfigError otherwise.
std::uint64_t ParseByteSize(const std::string& text);

struct GenKbcOptions {
  int n = 10;
  std::vector<std::string> path = {"north", "east"};
  std::string target = "north_east";
  double holdout = 0.2;
};

// Dataset directories hold kb.tsv, schema.tsv and manifest.json, plus the
// split files of their kind.
int CmdGenGrid(const GlobalOptions& g, const GridSpec& spec, std::ostream& log);
int CmdGenQa(const GlobalOptions& g, GridQaSpec spec, std::ostream& log);
int CmdGenCvt(const GlobalOptions& g, CvtSpec spec, std::ostream& log);
int CmdGenKbc(const GlobalOptions& g, const GenKbcOptions& options, std::ostream& log);

// Writes bench.csv, kvmem.csv (when enabled), bench_summary.json and the
// SVG panels. bench.csv is byte-stable apart from its timing columns.
int CmdBenchFollow(const GlobalOptions& g, BenchConfig config, std::ostream& log);

struct TrainOptions {
  std::filesystem::path data;
  ModelSpec model;     // task, sizes and head settings; vocab is filled in
  bool hops_from_data = false;  // T = longest question in the training split
  TrainConfig train;   // seed is taken from the global options
};

// Writes model.json, checkpoint.bin, metrics.csv, metrics.json and
// manifest.json. A non-finite loss aborts with exit code 3 and keeps the
// last good checkpoint.
int CmdTrain(const GlobalOptions& g, TrainOptions options, std::ostream& log);

struct EvalOptions {
  std::filesystem::path model_dir;
  std::filesystem::path data;  // empty: the dataset recorded in model.json
  std::string split = "test";
  std::size_t k = 10;
};

// Prints H@1 and H@k and writes eval.json. ConsistencyError when the
// dataset's KB fingerprint differs from the one the model was trained on.
int CmdEval(const GlobalOptions& g, const EvalOptions& options, std::ostream& log);

// Runs every property suite; exit code 1 when any fails. Writes verify.json.
int CmdVerify(const GlobalOptions& g, std::size_t random_kbs, std::ostream& log);

// Re-renders the SVG panels from bench.csv (and kvmem.csv when present).
int CmdPlot(const GlobalOptions& g, const std::filesystem::path& bench_dir, std::ostream& log);

// Loaded dataset directory.
struct DatasetDir {
  std::string kind;  // grid | grid-qa | cvt | kbc
  std::shared_ptr<const KnowledgeBase> kb;
  std::vector<std::string> vocab;
  std::vector<Example> train, dev, test;
};

// For kbc the splits are train (kept facts), dev (the same queries) and
// test (held-out heads).
DatasetDir LoadDataset(const std::filesystem::path& dir);

// The grid recipe used for the chain decoder: hop curriculum, Adam at
// 3e-3 with gradient clipping.
TrainConfig DefaultChainTrainConfig();

// KB completion has few facts per epoch: small batches, a higher rate and
// more epochs.
TrainConfig DefaultKbcTrainConfig();

std::string StopModeName(StopMode mode);
StopMode ParseStopMode(const std::string& name);

}  // namespace reifkb

#endif  // REIFKB_COMMANDS_H_
