// Acceptance run: one PASS/FAIL line per criterion. Tolerances and budgets
// are fixed here; --only selects a subset while iterating.
//
//   acceptance [--only 1,2,5] [--work DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reifkb/bench.h"
#include "reifkb/commands.h"
#include "reifkb/dataset.h"
#include "reifkb/follow.h"
#include "reifkb/models.h"
#include "reifkb/parallel.h"
#include "reifkb/synth.h"
#include "reifkb/train.h"
#include "reifkb/verify.h"

using namespace reifkb;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string Join(const std::vector<double>& v, const char* format) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + Fmt(format, v[i]);
  return s;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

void Report(int id, const std::string& name, const Outcome& o, double seconds) {
  std::cout << (o.passed ? "PASS" : "FAIL") << "  " << id << "  " << name << ": " << o.detail
            << " [" << Fmt("%.1f", seconds) << "s]" << std::endl;
}

Outcome FromSuite(const SuiteResult& r, double seconds, double budget) {
  Outcome o;
  o.passed = r.passed && seconds < budget;
  o.detail = r.detail + " (" + std::to_string(r.cases) + " cases, worst " +
             Fmt("%.3g", r.worst) + ", limit " + Fmt("%.3g", r.limit) + ", budget " +
             Fmt("%.0f", budget) + "s)";
  return o;
}

// ---- grid QA -------------------------------------------------------------

struct ChainRun {
  double test_hits = 0.0;
  double longest_hits = 0.0;  // questions with exactly max_hops hops
  double seconds = 0.0;
};

ChainRun TrainChain(std::uint64_t seed, std::size_t max_hops, bool vh) {
  const auto start = Clock::now();
  auto kb = std::make_shared<const KnowledgeBase>(GenGridKb({10, 0, vh}));
  GridQaSpec q;
  q.n = 10;
  q.max_hops = max_hops;
  q.vertical_horizontal = vh;
  q.seed = seed;
  const QaDataset data = GenGridQa(*kb, q);
  ModelSpec spec;
  spec.task = "chain";
  spec.vocab_size = data.vocab.size();
  spec.hops = max_hops;
  spec.seed = seed;
  auto model = CreateModel(spec, kb);
  TrainConfig config = DefaultChainTrainConfig();
  config.seed = seed;
  Train(*model, data.train, data.dev, config);
  ChainRun run;
  run.test_hits = Evaluate(*model, data.test, 1).hits_at_1;
  std::vector<Example> longest;
  for (const Example& e : data.test)
    if (e.hops == static_cast<int>(max_hops)) longest.push_back(e);
  run.longest_hits = Evaluate(*model, longest, 1).hits_at_1;
  run.seconds = Since(start);
  std::cerr << "  chain T=" << max_hops << (vh ? " VH" : "") << " seed " << seed << ": test H@1 "
            << run.test_hits << ", " << max_hops << "-hop H@1 " << run.longest_hits << " ("
            << Fmt("%.0f", run.seconds) << "s)\n";
  return run;
}

const std::vector<std::uint64_t> kSeeds = {0, 1, 2};

// NSEW 10-hop runs are shared by criteria 7 and 8.
struct GridRuns {
  std::vector<ChainRun> nsew5, nsew10, vh10;
};

GridRuns& Runs() {
  static GridRuns runs;
  return runs;
}

const std::vector<ChainRun>& Nsew10() {
  if (Runs().nsew10.empty())
    for (std::uint64_t s : kSeeds) Runs().nsew10.push_back(TrainChain(s, 10, false));
  return Runs().nsew10;
}

std::vector<double> Field(const std::vector<ChainRun>& runs, double ChainRun::*f) {
  std::vector<double> v;
  for (const ChainRun& r : runs) v.push_back(r.*f);
  return v;
}

double TotalSeconds(const std::vector<ChainRun>& runs) {
  double s = 0.0;
  for (const ChainRun& r : runs) s += r.seconds;
  return s;
}

Outcome GridQaLearning() {
  for (std::uint64_t s : kSeeds) Runs().nsew5.push_back(TrainChain(s, 5, false));
  const auto& ten = Nsew10();
  const auto five_hits = Field(Runs().nsew5, &ChainRun::test_hits);
  const auto ten_hits = Field(ten, &ChainRun::test_hits);
  const auto ten_exact = Field(ten, &ChainRun::longest_hits);
  const double seconds = TotalSeconds(Runs().nsew5) + TotalSeconds(ten);
  Outcome o;
  o.passed = Median(five_hits) >= 0.90 && Median(ten_hits) >= 0.75 && Median(ten_exact) >= 0.75 &&
             seconds < 1800.0;
  o.detail = "median H@1 hops<=5 " + Fmt("%.4f", Median(five_hits)) + " (" +
             Join(five_hits, "%.4f") + ") >= 0.90; hops<=10 " + Fmt("%.4f", Median(ten_hits)) +
             " (" + Join(ten_hits, "%.4f") + "), exactly 10 hops " +
             Fmt("%.4f", Median(ten_exact)) + " (" + Join(ten_exact, "%.4f") +
             ") >= 0.75; training " + Fmt("%.0f", seconds) + "s < 1800s";
  return o;
}

Outcome SetValuedRobustness() {
  const auto& nsew = Nsew10();
  for (std::uint64_t s : kSeeds) Runs().vh10.push_back(TrainChain(s, 10, true));
  const double base = Median(Field(nsew, &ChainRun::test_hits));
  const auto vh_hits = Field(Runs().vh10, &ChainRun::test_hits);
  const double drop = base - Median(vh_hits);
  const double seconds = TotalSeconds(Runs().vh10);
  Outcome o;
  o.passed = drop <= 0.20 && seconds < 1800.0;
  o.detail = "10-hop median H@1 NSEW " + Fmt("%.4f", base) + ", NSEW-VH " +
             Fmt("%.4f", Median(vh_hits)) + " (" + Join(vh_hits, "%.4f") + "), drop " +
             Fmt("%.1f", 100.0 * drop) + " points <= 20; VH training " + Fmt("%.0f", seconds) +
             "s < 1800s";
  return o;
}

// ---- KB completion -------------------------------------------------------

Outcome KbCompletion() {
  KnowledgeBase grid = GenGridKb({10});
  std::vector<double> hits;
  for (std::uint64_t seed : kSeeds) {
    KbcSplit split = GenKbcSplit(grid, {"north", "east"}, "north_east", 0.2, seed);
    auto kb = std::make_shared<const KnowledgeBase>(split.train_kb);
    const auto train = KbcExamples(*kb, split.train);
    const auto eval = KbcExamples(*kb, split.eval);
    ModelSpec spec;
    spec.task = "kbc";
    spec.chains = 2;
    spec.hops = 3;
    spec.activation = HeadActivation::kSigmoid;
    spec.seed = seed;
    auto model = CreateModel(spec, kb);
    TrainConfig config = DefaultKbcTrainConfig();
    config.seed = seed;
    Train(*model, train, train, config);
    hits.push_back(Evaluate(*model, eval, 1).hits_at_1);
  }

  // Expansion identity on random non-negative inputs.
  auto kb = std::make_shared<const KnowledgeBase>(grid);
  auto engine = FollowEngine::Create(kb, Strategy::kReified);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random = [&](std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = u(rng);
    return m;
  };
  double worst = 0.0;
  for (std::size_t steps = 1; steps <= 3; ++steps) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Matrix> rels;
      for (std::size_t t = 0; t < steps; ++t) rels.push_back(random(4, kb->num_relations()));
      const Matrix x0 = random(4, kb->num_entities());
      const Matrix a = KbcChainRecursive(x0, rels, *engine);
      const Matrix b = KbcChainExpanded(x0, rels, *engine);
      for (std::size_t i = 0; i < a.data().size(); ++i)
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
  }
  Outcome o;
  o.passed = Median(hits) >= 0.8 && worst <= 1e-10;
  o.detail = "north_east, 20% held out, N=2 T=3: median eval H@1 " + Fmt("%.4f", Median(hits)) +
             " (" + Join(hits, "%.4f") + ") >= 0.8; expansion identity T<=3 max diff " +
             Fmt("%.3g", worst) + " <= 1e-10";
  return o;
}

// ---- benchmarks ----------------------------------------------------------

Outcome ScalingTrend(double* seconds) {
  const auto start = Clock::now();
  SetNumThreads(1);
  BenchConfig config;
  config.grid_sizes = {100};
  config.relation_counts = {4, 1000};
  config.strategies = {Strategy::kLateMixing, Strategy::kReified};
  config.kvmem = false;
  const auto records = RunFollowBench(config);
  auto qps = [&](const std::string& strategy, std::size_t relations) {
    for (const RunRecord& r : records)
      if (r.strategy == strategy && r.num_relations == relations) return r.qps;
    return 0.0;
  };
  const double late4 = qps("late", 4), late1000 = qps("late", 1000);
  const double re4 = qps("reified", 4), re1000 = qps("reified", 1000);
  *seconds = Since(start);
  const double speedup = late1000 > 0 ? re1000 / late1000 : 0.0;
  const double spread = std::max(re4, re1000) / std::max(1e-300, std::min(re4, re1000));
  const double degrade = late1000 > 0 ? late4 / late1000 : 0.0;
  Outcome o;
  o.passed = speedup >= 5.0 && spread <= 3.0 && degrade >= 20.0 && *seconds < 600.0;
  o.detail = "n=100 qps late " + Fmt("%.1f", late4) + " -> " + Fmt("%.1f", late1000) +
             ", reified " + Fmt("%.1f", re4) + " -> " + Fmt("%.1f", re1000) +
             "; reified/late at N_R=1000 " + Fmt("%.1f", speedup) + "x >= 5, reified spread " +
             Fmt("%.2f", spread) + "x <= 3, late degradation " + Fmt("%.1f", degrade) + "x >= 20";
  return o;
}

Outcome KvAccounting() {
  SetNumThreads(1);
  BenchConfig config;
  const auto records = RunKvBench(config);
  const auto parsed = ParseKvRecordsCsv(KvRecordsCsv(records));
  bool bytes_ok = parsed.size() == records.size();
  for (const KvRecord& r : parsed) {
    bytes_ok = bytes_ok && r.kv_bytes_per_triple == 2 * r.embed_dim * 8 &&
               r.reified_ints_per_triple == 6 && r.reified_floats_per_triple == 3 &&
               r.reified_bytes_per_triple == 6 * sizeof(Index) + 3 * sizeof(double);
  }
  const KvFit fit = FitKv(parsed);
  Outcome o;
  o.passed = bytes_ok && fit.slope > 0.0 && fit.decades >= 3.0;
  std::ostringstream d;
  d << "bytes/triple in CSV: KV " << (parsed.empty() ? 0 : parsed[0].kv_bytes_per_triple)
    << " (2*" << config.kv_embed_dim << "*8), reified "
    << (parsed.empty() ? 0 : parsed[0].reified_bytes_per_triple) << " (6 ints + 3 floats) "
    << (bytes_ok ? "ok" : "MISMATCH") << "; N_T " << parsed.front().num_triples << " -> "
    << parsed.back().num_triples << " (" << Fmt("%.2f", fit.decades) << " decades), slope "
    << Fmt("%.3g", fit.slope) << " s/triple > 0, log-log slope " << Fmt("%.2f", fit.loglog_slope);
  o.detail = d.str();
  return o;
}

// ---- reproducibility -----------------------------------------------------

std::vector<std::string> DiffTrees(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diffs;
  std::set<fs::path> names;
  for (const fs::path& root : {a, b})
    for (const auto& e : fs::recursive_directory_iterator(root))
      if (e.is_regular_file()) names.insert(fs::relative(e.path(), root));
  for (const fs::path& n : names) {
    if (!fs::exists(a / n) || !fs::exists(b / n) ||
        ReadTextFile(a / n) != ReadTextFile(b / n))
      diffs.push_back(n.string());
  }
  return diffs;
}

Outcome Reproducibility(const fs::path& work) {
  std::ostringstream sink;
  auto run_all = [&](const fs::path& root, const fs::path& data_root) {
    GlobalOptions g;
    g.seed = 3;
    g.out = root / "grid";
    CmdGenGrid(g, {6, 0, true}, sink);
    GridQaSpec qa;
    qa.n = 6;
    qa.max_hops = 3;
    qa.train_count = 600;
    qa.dev_count = 100;
    qa.test_count = 100;
    g.out = root / "qa";
    CmdGenQa(g, qa, sink);
    CvtSpec cvt;
    cvt.num_entities = 40;
    cvt.num_events = 30;
    cvt.train_count = 200;
    cvt.dev_count = 50;
    cvt.test_count = 50;
    g.out = root / "cvt";
    CmdGenCvt(g, cvt, sink);
    g.out = root / "kbc";
    CmdGenKbc(g, GenKbcOptions{}, sink);

    // Training reads the first run's data so model.json records one path.
    TrainOptions chain;
    chain.data = data_root / "qa";
    chain.model.task = "chain";
    chain.model.embed_dim = 12;
    chain.model.hidden_dim = 12;
    chain.hops_from_data = true;
    chain.train = DefaultChainTrainConfig();
    chain.train.epochs = 2;
    chain.train.curriculum_epochs = 1;
    g.out = root / "train_chain";
    CmdTrain(g, chain, sink);
    TrainOptions kbc;
    kbc.data = data_root / "kbc";
    kbc.model.task = "kbc";
    kbc.model.hops = 3;
    kbc.model.activation = HeadActivation::kSigmoid;
    kbc.train = DefaultKbcTrainConfig();
    kbc.train.epochs = 3;
    g.out = root / "train_kbc";
    CmdTrain(g, kbc, sink);

    g.out = root / "verify";
    CmdVerify(g, 20, sink);
  };
  const fs::path a = work / "repro_a", b = work / "repro_b";
  fs::remove_all(a);
  fs::remove_all(b);
  run_all(a, a);
  run_all(b, a);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) files += e.is_regular_file();
  const auto diffs = DiffTrees(a, b);
  Outcome o;
  o.passed = diffs.empty() && files > 0;
  o.detail = "gen-grid, gen-qa, gen-cvt, gen-kbc, train (chain, kbc), verify run twice: " +
             std::to_string(files) + " files, " + std::to_string(diffs.size()) + " differ";
  for (const std::string& d : diffs) o.detail += " " + d;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  fs::path work = fs::temp_directory_path() / "reifkb_acceptance";
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--work", work, "scratch directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };
  fs::create_directories(work);
  SetNumThreads(1);

  VerifyOptions verify;
  int failures = 0;
  auto run = [&](int id, const std::string& name, const std::function<Outcome(double*)>& body) {
    if (!wanted(id)) return;
    const auto start = Clock::now();
    double seconds = 0.0;
    Outcome o;
    try {
      o = body(&seconds);
    } catch (const std::exception& e) {
      o.detail = std::string("error: ") + e.what();
    }
    failures += !o.passed;
    Report(id, name, o, Since(start));
  };
  auto suite = [&](double budget, SuiteResult (*fn)(const VerifyOptions&)) {
    return [=](double*) {
      const auto start = Clock::now();
      SuiteResult r = fn(verify);
      return FromSuite(r, Since(start), budget);
    };
  };

  run(1, "strategy equivalence", suite(60.0, VerifyEquivalence));
  run(2, "oracle support", suite(60.0, VerifyOracle));
  run(3, "op counts", suite(60.0, VerifyOpCounts));
  run(4, "shard equivalence", [&](double*) {
    SetNumThreads(4);
    const auto start = Clock::now();
    SuiteResult r = VerifyShards(verify);
    SetNumThreads(1);
    return FromSuite(r, Since(start), 60.0);
  });
  run(5, "scaling trend", [&](double* seconds) { return ScalingTrend(seconds); });
  run(6, "gradient checks", [&](double*) {
    const auto start = Clock::now();
    GradCheckOptions options;
    options.seed = 5;
    Outcome o;
    o.passed = true;
    for (const SuiteResult& r : VerifyGradients(options)) {
      o.passed = o.passed && r.passed;
      o.detail += (o.detail.empty() ? "" : "; ") + r.name + " " + Fmt("%.3g", r.worst) +
                  (r.passed ? "" : " (over)");
    }
    const double seconds = Since(start);
    o.passed = o.passed && seconds < 300.0;
    o.detail += "; limit 1e-4, eps 1e-6, 200 coordinates";
    return o;
  });
  run(7, "grid QA learning", [&](double*) { return GridQaLearning(); });
  run(8, "set-valued robustness", [&](double*) { return SetValuedRobustness(); });
  run(9, "KB completion", [&](double*) { return KbCompletion(); });
  run(10, "KV-mem accounting", [&](double*) { return KvAccounting(); });
  run(11, "reproducibility", [&](double*) { return Reproducibility(work); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
