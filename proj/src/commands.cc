#include "reifkb/commands.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reifkb/dataset.h"
#include "reifkb/errors.h"
#include "reifkb/hash.h"
#include "reifkb/kb_io.h"
#include "reifkb/parallel.h"
#include "reifkb/verify.h"

namespace reifkb {

namespace fs = std::filesystem;
using nlohmann::json;

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const NumericsError*>(&e) != nullptr) return kExitNumerics;
  return kExitUsage;
}

std::uint64_t ParseByteSize(const std::string& text) {
  std::size_t pos = 0;
  double value = 0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("bad byte size \"" + text + "\"");
  }
  std::string unit = text.substr(pos);
  for (char& ch : unit) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (!unit.empty() && unit.back() == 'B') unit.pop_back();
  if (!unit.empty() && unit.back() == 'I') unit.pop_back();
  double scale = 1;
  if (unit == "K") scale = 1024.0;
  else if (unit == "M") scale = 1024.0 * 1024;
  else if (unit == "G") scale = 1024.0 * 1024 * 1024;
  else if (!unit.empty()) throw ConfigError("bad byte size unit in \"" + text + "\"");
  if (!(value > 0)) throw ConfigError("byte size must be positive: \"" + text + "\"");
  return static_cast<std::uint64_t>(value * scale);
}

std::string StopModeName(StopMode mode) {
  switch (mode) {
    case StopMode::kRaw: return "raw";
    case StopMode::kAbsorbLast: return "absorb_last";
    case StopMode::kRenormalize: return "renormalize";
  }
  return "?";
}

StopMode ParseStopMode(const std::string& name) {
  if (name == "raw") return StopMode::kRaw;
  if (name == "absorb_last") return StopMode::kAbsorbLast;
  if (name == "renormalize") return StopMode::kRenormalize;
  throw ConfigError("unknown stop mode \"" + name + "\" (raw | absorb_last | renormalize)");
}

TrainConfig DefaultChainTrainConfig() {
  TrainConfig c;
  c.epochs = 8;
  c.batch_size = 32;
  c.patience = 4;
  c.curriculum_epochs = 2;
  c.optimizer.lr = 3e-3;
  c.optimizer.clip_norm = 5.0;
  return c;
}

TrainConfig DefaultKbcTrainConfig() {
  TrainConfig c;
  c.epochs = 60;
  c.batch_size = 8;
  c.patience = 10;
  c.optimizer.lr = 1e-2;
  return c;
}

namespace {

void SaveKbFiles(const KnowledgeBase& kb, const fs::path& dir) {
  fs::create_directories(dir);
  SaveKnowledgeBase(kb, dir / "kb.tsv", dir / "schema.tsv");
}

// manifest.json: kind, seed, generator settings, counts and a content hash
// of every listed file. No timestamps, so reruns are byte-identical.
void WriteManifest(const fs::path& dir, const std::string& kind, std::uint64_t seed,
                   const json& spec, const json& counts, const std::vector<std::string>& files,
                   const json& extra = json::object()) {
  json m;
  m["kind"] = kind;
  m["seed"] = seed;
  m["spec"] = spec;
  m["counts"] = counts;
  json hashes = json::object();
  for (const std::string& f : files) hashes[f] = FileDigest(dir / f);
  m["files"] = hashes;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  WriteTextFile(dir / "manifest.json", m.dump(2) + "\n");
}

json KbCounts(const KnowledgeBase& kb) {
  return {{"entities", kb.num_entities()},
          {"relations", kb.num_relations()},
          {"triples", kb.num_triples()},
          {"fingerprint", HexDigest(kb.fingerprint())}};
}

void WriteQa(const fs::path& dir, const QaDataset& qa) {
  WriteVocab(qa.vocab, dir / "vocab.txt");
  WriteExamples(qa.train, dir / "train.jsonl");
  WriteExamples(qa.dev, dir / "dev.jsonl");
  WriteExamples(qa.test, dir / "test.jsonl");
}

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadTextFile(path));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

int CmdGenGrid(const GlobalOptions& g, const GridSpec& spec, std::ostream& log) {
  KnowledgeBase kb = GenGridKb(spec);
  SaveKbFiles(kb, g.out);
  json s = {{"n", spec.n},
            {"relation_split", spec.relation_split},
            {"vertical_horizontal", spec.vertical_horizontal}};
  WriteManifest(g.out, "grid", g.seed, s, KbCounts(kb), {"kb.tsv", "schema.tsv"});
  log << "grid " << spec.n << "x" << spec.n << ": " << kb.num_entities() << " entities, "
      << kb.num_relations() << " relations, " << kb.num_triples() << " triples -> "
      << g.out.string() << "\n";
  return kExitOk;
}

int CmdGenQa(const GlobalOptions& g, GridQaSpec spec, std::ostream& log) {
  spec.seed = g.seed;
  KnowledgeBase kb = GenGridKb({spec.n, 0, spec.vertical_horizontal});
  QaDataset qa = GenGridQa(kb, spec);
  SaveKbFiles(kb, g.out);
  WriteQa(g.out, qa);
  json s = {{"n", spec.n},
            {"max_hops", spec.max_hops},
            {"vertical_horizontal", spec.vertical_horizontal},
            {"train_count", spec.train_count},
            {"dev_count", spec.dev_count},
            {"test_count", spec.test_count}};
  json counts = KbCounts(kb);
  counts["train"] = qa.train.size();
  counts["dev"] = qa.dev.size();
  counts["test"] = qa.test.size();
  counts["vocab"] = qa.vocab.size();
  WriteManifest(g.out, "grid-qa", g.seed, s, counts,
                {"kb.tsv", "schema.tsv", "vocab.txt", "train.jsonl", "dev.jsonl", "test.jsonl"});
  log << "grid QA (" << (spec.vertical_horizontal ? "NSEW-VH" : "NSEW") << ", up to "
      << spec.max_hops << " hops): " << qa.train.size() << " train, " << qa.dev.size()
      << " dev, " << qa.test.size() << " test -> " << g.out.string() << "\n";
  return kExitOk;
}

int CmdGenCvt(const GlobalOptions& g, CvtSpec spec, std::ostream& log) {
  spec.seed = g.seed;
  CvtDataset data = GenCvt(spec);
  SaveKbFiles(data.kb, g.out);
  WriteQa(g.out, data.qa);
  json s = {{"num_entities", spec.num_entities}, {"num_events", spec.num_events},
            {"ee_relations", spec.ee_relations}, {"ec_relations", spec.ec_relations},
            {"ce_relations", spec.ce_relations}, {"ee_fanout", spec.ee_fanout},
            {"train_count", spec.train_count},   {"dev_count", spec.dev_count},
            {"test_count", spec.test_count}};
  json counts = KbCounts(data.kb);
  counts["train"] = data.qa.train.size();
  counts["dev"] = data.qa.dev.size();
  counts["test"] = data.qa.test.size();
  counts["vocab"] = data.qa.vocab.size();
  WriteManifest(g.out, "cvt", g.seed, s, counts,
                {"kb.tsv", "schema.tsv", "vocab.txt", "train.jsonl", "dev.jsonl", "test.jsonl"});
  log << "cvt: " << data.kb.num_triples() << " triples, " << data.qa.train.size() << " train, "
      << data.qa.dev.size() << " dev, " << data.qa.test.size() << " test -> " << g.out.string()
      << "\n";
  return kExitOk;
}

int CmdGenKbc(const GlobalOptions& g, const GenKbcOptions& o, std::ostream& log) {
  KnowledgeBase grid = GenGridKb({o.n});
  KbcSplit split = GenKbcSplit(grid, o.path, o.target, o.holdout, g.seed);
  SaveKbFiles(split.train_kb, g.out);
  WriteKbcQueries(split.train, g.out / "kbc_train.jsonl");
  WriteKbcQueries(split.eval, g.out / "kbc_eval.jsonl");
  json s = {{"n", o.n}, {"path", o.path}, {"target", o.target}, {"holdout", o.holdout}};
  json counts = KbCounts(split.train_kb);
  counts["target_facts"] = split.total_facts;
  counts["held_out_facts"] = split.held_out_facts;
  counts["train_queries"] = split.train.size();
  counts["eval_queries"] = split.eval.size();
  WriteManifest(g.out, "kbc", g.seed, s, counts,
                {"kb.tsv", "schema.tsv", "kbc_train.jsonl", "kbc_eval.jsonl"},
                {{"warnings", split.warnings}});
  for (const std::string& w : split.warnings) log << "warning: " << w << "\n";
  log << "kbc " << o.target << ": " << split.total_facts << " facts, "
      << split.total_facts - split.held_out_facts << " kept, " << split.held_out_facts
      << " held out -> " << g.out.string() << "\n";
  return kExitOk;
}

DatasetDir LoadDataset(const fs::path& dir) {
  const json m = ReadJson(dir / "manifest.json");
  DatasetDir d;
  d.kind = m.value("kind", "");
  d.kb = std::make_shared<const KnowledgeBase>(
      LoadKnowledgeBase(dir / "kb.tsv", std::optional<fs::path>(dir / "schema.tsv")));
  const std::string expected = m.at("counts").value("fingerprint", "");
  if (HexDigest(d.kb->fingerprint()) != expected) {
    throw ConsistencyError(dir.string() + ": KB fingerprint " + HexDigest(d.kb->fingerprint()) +
                           " does not match the manifest (" + expected + ")");
  }
  if (d.kind == "grid-qa" || d.kind == "cvt") {
    d.vocab = ReadVocab(dir / "vocab.txt");
    d.train = ReadExamples(dir / "train.jsonl");
    d.dev = ReadExamples(dir / "dev.jsonl");
    d.test = ReadExamples(dir / "test.jsonl");
  } else if (d.kind == "kbc") {
    d.train = KbcExamples(*d.kb, ReadKbcQueries(dir / "kbc_train.jsonl"));
    d.dev = d.train;
    d.test = KbcExamples(*d.kb, ReadKbcQueries(dir / "kbc_eval.jsonl"));
  } else if (d.kind != "grid") {
    throw ConfigError(dir.string() + ": unknown dataset kind \"" + d.kind + "\"");
  }
  return d;
}

namespace {

json SpecJson(const ModelSpec& s) {
  return {{"task", s.task},
          {"vocab_size", s.vocab_size},
          {"embed_dim", s.embed_dim},
          {"hidden_dim", s.hidden_dim},
          {"hops", s.hops},
          {"chains", s.chains},
          {"mask_seeds", s.mask_seeds},
          {"stop_mode", StopModeName(s.stop_mode)},
          {"activation", s.activation == HeadActivation::kSigmoid ? "sigmoid" : "softmax"},
          {"mask_query_relation", s.mask_query_relation},
          {"entity_type", s.entity_type},
          {"cvt_type", s.cvt_type},
          {"strategy", StrategyName(s.strategy)},
          {"seed", s.seed}};
}

ModelSpec SpecFromJson(const json& j) {
  ModelSpec s;
  s.task = j.at("task").get<std::string>();
  s.vocab_size = j.at("vocab_size").get<std::size_t>();
  s.embed_dim = j.at("embed_dim").get<std::size_t>();
  s.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  s.hops = j.at("hops").get<std::size_t>();
  s.chains = j.at("chains").get<std::size_t>();
  s.mask_seeds = j.at("mask_seeds").get<bool>();
  s.stop_mode = ParseStopMode(j.at("stop_mode").get<std::string>());
  s.activation = j.at("activation").get<std::string>() == "sigmoid" ? HeadActivation::kSigmoid
                                                                    : HeadActivation::kSoftmax;
  s.mask_query_relation = j.at("mask_query_relation").get<bool>();
  s.entity_type = j.at("entity_type").get<std::string>();
  s.cvt_type = j.at("cvt_type").get<std::string>();
  s.strategy = ParseStrategy(j.at("strategy").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json MetricsJson(const Metrics& m) {
  return {{"hits_at_1", m.hits_at_1},
          {"hits_at_k", m.hits_at_k},
          {"k", m.k},
          {"mean_loss", m.mean_loss},
          {"count", m.count}};
}

void CheckTaskFits(const std::string& task, const std::string& kind) {
  const bool ok = (task == "kbc" && kind == "kbc") || (task == "cvt" && kind == "cvt") ||
                  ((task == "multihop" || task == "chain") && (kind == "grid-qa" || kind == "cvt"));
  if (!ok) throw ConfigError("task \"" + task + "\" cannot train on a \"" + kind + "\" dataset");
}

}  // namespace

int CmdTrain(const GlobalOptions& g, TrainOptions o, std::ostream& log) {
  SetNumThreads(g.threads);
  DatasetDir data = LoadDataset(o.data);
  CheckTaskFits(o.model.task, data.kind);
  o.model.seed = g.seed;
  o.model.vocab_size = data.vocab.size();
  if (o.hops_from_data) {
    int longest = 1;
    for (const Example& e : data.train) longest = std::max(longest, e.hops);
    o.model.hops = static_cast<std::size_t>(longest);
  }
  o.train.seed = g.seed;
  fs::create_directories(g.out);
  o.train.checkpoint_path = (g.out / "checkpoint.bin").string();

  auto model = CreateModel(o.model, data.kb);
  json model_json = {{"spec", SpecJson(o.model)},
                     {"data", fs::absolute(o.data).lexically_normal().string()},
                     {"kb_fingerprint", HexDigest(data.kb->fingerprint())}};
  WriteTextFile(g.out / "model.json", model_json.dump(2) + "\n");

  std::ostringstream csv;
  csv << "epoch,max_hops,train_loss,dev_hits_at_1,dev_hits_at_k,dev_loss\n";
  const auto start = std::chrono::steady_clock::now();
  auto on_epoch = [&](const EpochRecord& r) {
    csv << r.epoch << ',' << r.max_hops << ',' << FormatDouble(r.train_loss) << ','
        << FormatDouble(r.dev.hits_at_1) << ',' << FormatDouble(r.dev.hits_at_k) << ','
        << FormatDouble(r.dev.mean_loss) << '\n';
    WriteTextFile(g.out / "metrics.csv", csv.str());
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[200];
    std::snprintf(buf, sizeof buf, "epoch %zu%s loss %.4f dev H@1 %.4f (%.0fs)\n", r.epoch,
                  r.max_hops > 0 ? (" [hops<=" + std::to_string(r.max_hops) + "]").c_str() : "",
                  r.train_loss, r.dev.hits_at_1, sec);
    log << buf << std::flush;
  };
  TrainResult result = Train(*model, data.train, data.dev, o.train, on_epoch);

  json metrics = {{"best_epoch", result.best_epoch},
                  {"stopped_early", result.stopped_early},
                  {"epochs_run", result.history.size()},
                  {"dev", MetricsJson(result.best_dev)}};
  if (!data.test.empty()) metrics["test"] = MetricsJson(Evaluate(*model, data.test, o.train.eval_k));
  WriteTextFile(g.out / "metrics.json", metrics.dump(2) + "\n");
  WriteManifest(g.out, "model", g.seed,
                {{"model", SpecJson(o.model)},
                 {"epochs", o.train.epochs},
                 {"batch_size", o.train.batch_size},
                 {"patience", o.train.patience},
                 {"curriculum_epochs", o.train.curriculum_epochs},
                 {"lr", o.train.optimizer.lr},
                 {"clip_norm", o.train.optimizer.clip_norm}},
                {{"train", data.train.size()}, {"dev", data.dev.size()}, {"test", data.test.size()}},
                {"model.json", "checkpoint.bin", "metrics.csv", "metrics.json"});
  log << "best epoch " << result.best_epoch << ": dev H@1 " << result.best_dev.hits_at_1;
  if (metrics.contains("test")) log << ", test H@1 " << metrics["test"]["hits_at_1"].get<double>();
  log << "\n";
  return kExitOk;
}

int CmdEval(const GlobalOptions& g, const EvalOptions& o, std::ostream& log) {
  SetNumThreads(g.threads);
  const json mj = ReadJson(o.model_dir / "model.json");
  const fs::path data_dir = o.data.empty() ? fs::path(mj.at("data").get<std::string>()) : o.data;
  DatasetDir data = LoadDataset(data_dir);
  const std::string want = mj.at("kb_fingerprint").get<std::string>();
  if (HexDigest(data.kb->fingerprint()) != want) {
    throw ConsistencyError("dataset KB fingerprint " + HexDigest(data.kb->fingerprint()) +
                           " differs from the model's (" + want + ")");
  }
  auto model = CreateModel(SpecFromJson(mj.at("spec")), data.kb);
  LoadCheckpoint(&model->params(), o.model_dir / "checkpoint.bin");
  const std::vector<Example>* split = nullptr;
  if (o.split == "train") split = &data.train;
  else if (o.split == "dev") split = &data.dev;
  else if (o.split == "test") split = &data.test;
  else throw ConfigError("unknown split \"" + o.split + "\" (train | dev | test)");
  const Metrics m = Evaluate(*model, *split, o.k);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-8s %8s %8s %8s\n%-8s %8.4f %8.4f %8zu\n", "split", "H@1",
                ("H@" + std::to_string(o.k)).c_str(), "count", o.split.c_str(), m.hits_at_1,
                m.hits_at_k, m.count);
  log << buf;
  fs::create_directories(g.out);
  json e = MetricsJson(m);
  e["split"] = o.split;
  WriteTextFile(g.out / "eval.json", e.dump(2) + "\n");
  return kExitOk;
}

int CmdVerify(const GlobalOptions& g, std::size_t random_kbs, std::ostream& log) {
  SetNumThreads(g.threads);
  VerifyOptions options;
  options.seed = g.seed;
  options.random_kbs = random_kbs;
  const std::vector<SuiteResult> results = RunAllSuites(options);
  PrintSuiteTable(results, log);
  json j = json::array();
  bool ok = true;
  for (const SuiteResult& r : results) {
    ok = ok && r.passed;
    j.push_back({{"suite", r.name},
                 {"passed", r.passed},
                 {"cases", r.cases},
                 {"worst", r.worst},
                 {"limit", r.limit},
                 {"detail", r.detail}});
  }
  fs::create_directories(g.out);
  WriteTextFile(g.out / "verify.json", json{{"seed", g.seed}, {"suites", j}}.dump(2) + "\n");
  return ok ? kExitOk : kExitPropertyFailure;
}

int CmdBenchFollow(const GlobalOptions& g, BenchConfig config, std::ostream& log) {
  // Strategy comparison runs single-threaded; --threads feeds the sharded rows.
  config.seed = g.seed;
  config.mem_budget_bytes = g.mem_budget_bytes;
  SetNumThreads(1);
  auto say = [&](const std::string& s) { log << s << "\n" << std::flush; };
  std::vector<RunRecord> runs;
  {
    BenchConfig plain = config;
    plain.shards = 1;
    runs = RunFollowBench(plain, say);
  }
  if (config.shards > 1) {
    SetNumThreads(g.threads);
    BenchConfig sharded = config;
    sharded.strategies.clear();
    for (RunRecord& r : RunFollowBench(sharded, say)) runs.push_back(std::move(r));
    SetNumThreads(1);
  }
  fs::create_directories(g.out);
  WriteTextFile(g.out / "bench.csv", RunRecordsCsv(runs));
  std::vector<KvRecord> kv;
  std::vector<std::string> strategy_names;
  for (Strategy s : config.strategies) strategy_names.push_back(StrategyName(s));
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  // Timestamp and version live here so bench.csv keeps fixed columns.
  json summary = {{"seed", g.seed},
                  {"mem_budget_bytes", g.mem_budget_bytes},
                  {"threads", g.threads},
                  {"timestamp", stamp},
                  {"code_version", REIFKB_VERSION},
                  {"config",
                   {{"grid_sizes", config.grid_sizes},
                    {"relation_counts", config.relation_counts},
                    {"strategies", strategy_names},
                    {"batch", config.batch},
                    {"hops", config.hops},
                    {"warmup", config.warmup},
                    {"iterations", config.iterations},
                    {"shards", config.shards},
                    {"epsilon", config.epsilon},
                    {"kvmem", config.kvmem},
                    {"kv_grid_sizes", config.kv_grid_sizes},
                    {"kv_embed_dim", config.kv_embed_dim},
                    {"kv_batch", config.kv_batch}}}};
  if (config.kvmem) {
    kv = RunKvBench(config, say);
    WriteTextFile(g.out / "kvmem.csv", KvRecordsCsv(kv));
    const KvFit fit = FitKv(kv);
    summary["kvmem"] = {{"slope_seconds_per_triple", fit.slope},
                        {"intercept_seconds", fit.intercept},
                        {"loglog_slope", fit.loglog_slope},
                        {"decades", fit.decades}};
  }
  WriteTextFile(g.out / "bench_summary.json", summary.dump(2) + "\n");
  for (const fs::path& p : WriteBenchPlots(runs, kv, g.out)) log << "wrote " << p.string() << "\n";
  return kExitOk;
}

int CmdPlot(const GlobalOptions& g, const fs::path& bench_dir, std::ostream& log) {
  auto runs = ParseRunRecordsCsv(ReadTextFile(bench_dir / "bench.csv"));
  std::vector<KvRecord> kv;
  if (fs::exists(bench_dir / "kvmem.csv")) kv = ParseKvRecordsCsv(ReadTextFile(bench_dir / "kvmem.csv"));
  for (const fs::path& p : WriteBenchPlots(runs, kv, g.out)) log << "wrote " << p.string() << "\n";
  return kExitOk;
}

}  // namespace reifkb
