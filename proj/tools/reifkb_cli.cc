// reifkb: dataset generation, follow benchmarks, training and checks.
//
//   reifkb [--seed N] [--out DIR] [--threads N] [--mem-budget 2G]
//          [--config FILE] <verb> [verb options]
//
// The config file is TOML/INI: top-level keys mirror the global flags and
// a [verb] section mirrors that verb's flags, e.g.
//
//   seed = 3
//   out = "runs/qa"
//   [gen-qa]
//   max-hops = 10

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "reifkb/commands.h"
#include "reifkb/errors.h"

using namespace reifkb;

namespace {

template <typename T>
void Override(const std::optional<T>& v, T* field) {
  if (v) *field = *v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable relation following over symbolic knowledge bases"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file mirroring the flags");

  GlobalOptions g;
  std::string mem_budget = "2G";
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "OpenMP threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--mem-budget", mem_budget, "benchmark memory cap (e.g. 2G, 512M)")->capture_default_str();

  // gen-grid
  GridSpec grid;
  auto* gen_grid = app.add_subcommand("gen-grid", "n x n grid KB");
  gen_grid->add_option("--n", grid.n)->capture_default_str();
  gen_grid->add_option("--relation-split", grid.relation_split, "assign edges round-robin to m relations")->capture_default_str();
  gen_grid->add_flag("--vh", grid.vertical_horizontal, "add vertical_move / horizontal_move");

  // gen-qa
  GridQaSpec qa;
  auto* gen_qa = app.add_subcommand("gen-qa", "grid path questions");
  gen_qa->add_option("--n", qa.n)->capture_default_str();
  gen_qa->add_option("--max-hops", qa.max_hops)->capture_default_str();
  gen_qa->add_flag("--vh", qa.vertical_horizontal, "NSEW-VH grammar");
  gen_qa->add_option("--train", qa.train_count)->capture_default_str();
  gen_qa->add_option("--dev", qa.dev_count)->capture_default_str();
  gen_qa->add_option("--test", qa.test_count)->capture_default_str();

  // gen-cvt
  CvtSpec cvt;
  auto* gen_cvt = app.add_subcommand("gen-cvt", "entity/event KB with one- and two-hop questions");
  gen_cvt->add_option("--entities", cvt.num_entities)->capture_default_str();
  gen_cvt->add_option("--events", cvt.num_events)->capture_default_str();
  gen_cvt->add_option("--ee", cvt.ee_relations, "entity->entity relations")->capture_default_str();
  gen_cvt->add_option("--ec", cvt.ec_relations, "entity->event relations")->capture_default_str();
  gen_cvt->add_option("--ce", cvt.ce_relations, "event->entity relations")->capture_default_str();
  gen_cvt->add_option("--fanout", cvt.ee_fanout)->capture_default_str();
  gen_cvt->add_option("--train", cvt.train_count)->capture_default_str();
  gen_cvt->add_option("--dev", cvt.dev_count)->capture_default_str();
  gen_cvt->add_option("--test", cvt.test_count)->capture_default_str();

  // gen-kbc
  GenKbcOptions kbc;
  auto* gen_kbc = app.add_subcommand("gen-kbc", "KB completion split for a composed relation");
  gen_kbc->add_option("--n", kbc.n)->capture_default_str();
  gen_kbc->add_option("--path", kbc.path, "relations to compose")->delimiter(',')->capture_default_str();
  gen_kbc->add_option("--target", kbc.target)->capture_default_str();
  gen_kbc->add_option("--holdout", kbc.holdout)->capture_default_str();

  // bench-follow
  BenchConfig bench;
  std::vector<std::string> strategies = {"naive", "late", "reified"};
  bool no_kvmem = false;
  auto* bench_cmd = app.add_subcommand("bench-follow", "2-hop follow throughput sweep");
  bench_cmd->add_option("--grid-sizes", bench.grid_sizes)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--relations", bench.relation_counts)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--strategies", strategies)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--batch", bench.batch)->capture_default_str();
  bench_cmd->add_option("--hops", bench.hops)->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup)->capture_default_str();
  bench_cmd->add_option("--iterations", bench.iterations)->capture_default_str();
  bench_cmd->add_option("--shards", bench.shards, "also time the reified KB in this many parallel shards")->capture_default_str();
  bench_cmd->add_option("--epsilon", bench.epsilon, "relation weights are 1 + eps * U(0,1)")->capture_default_str();
  bench_cmd->add_flag("--no-kvmem", no_kvmem, "skip the key-value memory baseline");
  bench_cmd->add_option("--kv-grid-sizes", bench.kv_grid_sizes)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--kv-embed-dim", bench.kv_embed_dim)->capture_default_str();
  bench_cmd->add_option("--kv-batch", bench.kv_batch)->capture_default_str();

  // train
  TrainOptions train;
  std::optional<std::size_t> embed, hidden, hops, chains, epochs, batch_size, patience, curriculum, eval_k;
  std::optional<double> lr, clip;
  std::optional<std::string> stop_mode, activation, strategy, optimizer;
  bool mask_seeds = false;
  auto* train_cmd = app.add_subcommand("train", "train a task model");
  train_cmd->add_option("--task", train.model.task, "multihop | cvt | kbc | chain")->required()
      ->check(CLI::IsMember({"multihop", "cvt", "kbc", "chain"}));
  train_cmd->add_option("--data", train.data, "dataset directory")->required();
  train_cmd->add_option("--embed-dim", embed);
  train_cmd->add_option("--hidden-dim", hidden);
  train_cmd->add_option("--hops", hops, "T (default: longest training question; kbc 3)");
  train_cmd->add_option("--chains", chains, "N (kbc)");
  train_cmd->add_flag("--mask-seeds", mask_seeds, "zero seed scores after two or more hops");
  train_cmd->add_option("--stop-mode", stop_mode, "raw | absorb_last | renormalize");
  train_cmd->add_option("--activation", activation, "softmax | sigmoid");
  train_cmd->add_option("--strategy", strategy, "naive | late | reified | sharded");
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--batch-size", batch_size);
  train_cmd->add_option("--patience", patience, "0 disables early stopping");
  train_cmd->add_option("--curriculum-epochs", curriculum, "epochs per hop-length stage");
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--clip-norm", clip);
  train_cmd->add_option("--optimizer", optimizer, "adam | sgd");
  train_cmd->add_option("--eval-k", eval_k);

  // eval
  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Hits@1 / Hits@k of a trained model");
  eval_cmd->add_option("--model", eval.model_dir, "directory written by train")->required();
  eval_cmd->add_option("--data", eval.data, "dataset directory (default: the training one)");
  eval_cmd->add_option("--split", eval.split)->capture_default_str();
  eval_cmd->add_option("--k", eval.k)->capture_default_str();

  // verify
  std::size_t random_kbs = 100;
  auto* verify_cmd = app.add_subcommand("verify", "run the property suites");
  verify_cmd->add_option("--random-kbs", random_kbs)->capture_default_str();

  // plot
  std::filesystem::path bench_dir;
  auto* plot_cmd = app.add_subcommand("plot", "render SVG panels from bench CSVs");
  plot_cmd->add_option("--bench-dir", bench_dir, "directory holding bench.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    g.mem_budget_bytes = ParseByteSize(mem_budget);
    std::ostream& log = std::cout;
    if (*gen_grid) return CmdGenGrid(g, grid, log);
    if (*gen_qa) return CmdGenQa(g, qa, log);
    if (*gen_cvt) return CmdGenCvt(g, cvt, log);
    if (*gen_kbc) return CmdGenKbc(g, kbc, log);
    if (*bench_cmd) {
      bench.strategies.clear();
      for (const std::string& s : strategies) bench.strategies.push_back(ParseStrategy(s));
      bench.kvmem = !no_kvmem;
      return CmdBenchFollow(g, bench, log);
    }
    if (*train_cmd) {
      if (train.model.task == "chain") train.train = DefaultChainTrainConfig();
      if (train.model.task == "kbc") {
        train.train = DefaultKbcTrainConfig();
        train.model.activation = HeadActivation::kSigmoid;
        train.model.hops = 3;
      }
      train.hops_from_data = !hops && (train.model.task == "chain" || train.model.task == "multihop");
      Override(embed, &train.model.embed_dim);
      Override(hidden, &train.model.hidden_dim);
      Override(hops, &train.model.hops);
      Override(chains, &train.model.chains);
      train.model.mask_seeds = mask_seeds;
      if (stop_mode) train.model.stop_mode = ParseStopMode(*stop_mode);
      if (activation) {
        if (*activation != "softmax" && *activation != "sigmoid")
          throw ConfigError("unknown activation \"" + *activation + "\"");
        train.model.activation =
            *activation == "sigmoid" ? HeadActivation::kSigmoid : HeadActivation::kSoftmax;
      }
      if (strategy) train.model.strategy = ParseStrategy(*strategy);
      Override(epochs, &train.train.epochs);
      Override(batch_size, &train.train.batch_size);
      Override(patience, &train.train.patience);
      Override(curriculum, &train.train.curriculum_epochs);
      Override(eval_k, &train.train.eval_k);
      Override(lr, &train.train.optimizer.lr);
      Override(clip, &train.train.optimizer.clip_norm);
      if (optimizer) {
        if (*optimizer == "adam") train.train.optimizer.kind = OptimizerConfig::Kind::kAdam;
        else if (*optimizer == "sgd") train.train.optimizer.kind = OptimizerConfig::Kind::kSgd;
        else throw ConfigError("unknown optimizer \"" + *optimizer + "\"");
      }
      return CmdTrain(g, train, log);
    }
    if (*eval_cmd) return CmdEval(g, eval, log);
    if (*verify_cmd) return CmdVerify(g, random_kbs, log);
    if (*plot_cmd) return CmdPlot(g, bench_dir, log);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
