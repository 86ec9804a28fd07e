#ifndef REIFKB_BENCH_H_
#define REIFKB_BENCH_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "reifkb/follow.h"

namespace reifkb {

struct BenchConfig {
  std::vector<int> grid_sizes = {10, 30, 100, 200, 300};
  std::vector<std::size_t> relation_counts = {4, 20, 100, 1000};
  std::vector<Strategy> strategies = {Strategy::kNaiveMixing, Strategy::kLateMixing,
                                      Strategy::kReified};
  std::size_t batch = 128;
  std::size_t hops = 2;
  std::size_t warmup = 1;
  std::size_t iterations = 3;  // >= 3
  // When > 1, reified rows are repeated with this many shards run in parallel.
  std::size_t shards = 1;
  std::uint64_t mem_budget_bytes = std::uint64_t{2} << 30;
  double epsilon = 0.01;  // relation weights are 1 + epsilon * U(0, 1)
  bool kvmem = true;
  std::vector<int> kv_grid_sizes = {5, 16, 50, 160};
  std::size_t kv_embed_dim = 64;
  std::size_t kv_batch = 32;
  std::uint64_t seed = 0;
};

// One sweep cell. Fields up to `bytes_per_triple` are deterministic given
// the config; the rest are wall-time measurements.
struct RunRecord {
  int n = 0;
  std::size_t num_entities = 0;
  std::size_t num_triples = 0;
  std::size_t num_relations = 0;
  std::string strategy;
  std::size_t shards = 1;
  std::size_t batch = 0;
  std::size_t hops = 0;
  std::size_t iterations = 0;
  std::string status;  // ok | over_budget | skipped
  std::uint64_t est_bytes = 0;
  OpCounts ops;        // whole minibatch, all hops
  double bytes_per_triple = 0.0;
  std::uint64_t seed = 0;
  double median_seconds = 0.0;
  double qps = 0.0;       // batch / median iteration time
  double qps_mean = 0.0;  // batch * iterations / total measured time
  double setup_seconds = 0.0;  // KB build and reification, excluded from qps
};

struct KvRecord {
  int n = 0;
  std::size_t num_triples = 0;
  std::size_t embed_dim = 0;
  std::size_t kv_bytes_per_triple = 0;
  std::size_t reified_ints_per_triple = 6;
  std::size_t reified_floats_per_triple = 3;
  std::size_t reified_bytes_per_triple = 0;
  std::size_t kv_bytes = 0;
  std::size_t reified_bytes = 0;
  double median_seconds = 0.0;
  double seconds_per_query = 0.0;
};

// Least-squares fits of per-query time against N_T.
struct KvFit {
  double slope = 0.0;         // seconds per query per triple
  double intercept = 0.0;
  double loglog_slope = 0.0;  // d log t / d log N_T
  double decades = 0.0;       // log10(max N_T / min N_T)
};

// Analytic resident estimate (floats and index slots times their sizes)
// for one minibatch of `hops` follows.
std::uint64_t EstimateBytes(Strategy strategy, std::size_t entities, std::size_t triples,
                            std::size_t relations, std::size_t batch, std::size_t shards);

using BenchLog = std::function<void(const std::string&)>;

// Sweeps grid size x relation count x strategy sequentially. Cells whose
// relation count exceeds the grid's edge count are skipped; cells over the
// memory budget report qps 0.
std::vector<RunRecord> RunFollowBench(const BenchConfig& config, const BenchLog& log = nullptr);
std::vector<KvRecord> RunKvBench(const BenchConfig& config, const BenchLog& log = nullptr);
KvFit FitKv(const std::vector<KvRecord>& records);

std::string RunRecordsCsv(const std::vector<RunRecord>& records);
std::vector<RunRecord> ParseRunRecordsCsv(const std::string& text);
std::string KvRecordsCsv(const std::vector<KvRecord>& records);
std::vector<KvRecord> ParseKvRecordsCsv(const std::string& text);

// Log-log SVG panels: qps against entity count (one file per relation
// count), qps against relation count (one per grid size), and KV-mem
// per-query time against N_T. Returns the written paths.
std::vector<std::filesystem::path> WriteBenchPlots(const std::vector<RunRecord>& records,
                                                   const std::vector<KvRecord>& kv,
                                                   const std::filesystem::path& dir);

}  // namespace reifkb

#endif  // REIFKB_BENCH_H_
