#include "reifkb/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reifkb/errors.h"

namespace reifkb {

std::vector<Index> TopK(std::span<const double> scores, std::size_t k) {
  k = std::min(k, scores.size());
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](Index a, Index b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  order.resize(k);
  return order;
}

bool HitAtK(std::span<const double> scores, std::span<const Index> answers, std::size_t k) {
  for (Index top : TopK(scores, k)) {
    if (std::find(answers.begin(), answers.end(), top) != answers.end()) return true;
  }
  return false;
}

Metrics Evaluate(const Model& model, std::span<const Example> data, std::size_t k,
                 std::size_t batch_size) {
  if (data.empty()) throw DatasetError("cannot evaluate on an empty dataset");
  if (k == 0 || batch_size == 0) throw ArgumentError("Evaluate: k and batch size must be >= 1");
  // Tapes only read parameter values here; no gradient is written.
  auto* params = const_cast<ParamStore*>(&model.params());
  Metrics m;
  m.k = k;
  double loss_sum = 0.0, hit1 = 0.0, hitk = 0.0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    std::vector<const Example*> ptrs;
    for (std::size_t i = start; i < end; ++i) ptrs.push_back(&data[i]);
    Tape tape(params);
    Var scores = model.Scores(tape, ptrs);
    std::vector<std::vector<Index>> answers;
    for (const Example* e : ptrs) answers.push_back(e->answers);
    Var loss = tape.CrossEntropyUniform(scores, answers);
    loss_sum += tape.value(loss)(0, 0) * static_cast<double>(ptrs.size());
    const Matrix& s = tape.value(scores);
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
      hit1 += HitAtK(s.row(i), ptrs[i]->answers, 1) ? 1.0 : 0.0;
      hitk += HitAtK(s.row(i), ptrs[i]->answers, k) ? 1.0 : 0.0;
    }
  }
  const double n = static_cast<double>(data.size());
  m.count = data.size();
  m.hits_at_1 = hit1 / n;
  m.hits_at_k = hitk / n;
  m.mean_loss = loss_sum / n;
  return m;
}

namespace {

std::vector<Example> UpToHops(std::span<const Example> data, std::size_t max_hops) {
  std::vector<Example> out;
  for (const Example& e : data)
    if (e.hops >= 0 && static_cast<std::size_t>(e.hops) <= max_hops) out.push_back(e);
  return out;
}

// One pass over `data` in a seeded order; returns the mean loss.
double RunEpoch(Model& model, std::span<const Example> data, std::size_t batch_size,
                Optimizer& optimizer, std::mt19937_64& rng) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::vector<const Example*> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(&data[order[i]]);
    model.params().ZeroGrad();
    Tape tape(&model.params());
    Var loss = model.Loss(tape, batch);
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value)) throw NumericsError("non-finite training loss");
    tape.Backward(loss);
    optimizer.Step(&model.params());
    loss_sum += value * static_cast<double>(batch.size());
  }
  return loss_sum / static_cast<double>(data.size());
}

}  // namespace

TrainResult Train(Model& model, std::span<const Example> train, std::span<const Example> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  if (train.empty()) throw DatasetError("training set is empty");
  if (dev.empty()) throw DatasetError("dev set is empty");
  if (config.batch_size == 0) throw ConfigError("batch size must be >= 1");

  std::mt19937_64 rng(config.seed);
  Optimizer optimizer(config.optimizer);
  TrainResult result;
  std::size_t epoch = 0;

  if (config.curriculum_epochs > 0) {
    int longest = 0;
    for (const Example& e : train) longest = std::max(longest, e.hops);
    for (std::size_t k = 1; k < static_cast<std::size_t>(longest); ++k) {
      std::vector<Example> stage_train = UpToHops(train, k), stage_dev = UpToHops(dev, k);
      if (stage_train.empty()) continue;
      for (std::size_t i = 0; i < config.curriculum_epochs; ++i) {
        EpochRecord record;
        record.epoch = ++epoch;
        record.max_hops = k;
        record.train_loss = RunEpoch(model, stage_train, config.batch_size, optimizer, rng);
        if (!stage_dev.empty()) record.dev = Evaluate(model, stage_dev, config.eval_k);
        result.history.push_back(record);
        if (on_epoch) on_epoch(record);
      }
    }
  }

  ParamStore best;
  for (const auto& [name, p] : model.params().all()) {
    best.all()[name] = Parameter{p.value, Matrix(p.value.rows(), p.value.cols())};
  }
  std::size_t since_best = 0;
  for (std::size_t i = 1; i <= config.epochs; ++i) {
    EpochRecord record;
    record.epoch = ++epoch;
    record.train_loss = RunEpoch(model, train, config.batch_size, optimizer, rng);
    record.dev = Evaluate(model, dev, config.eval_k);
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (result.best_epoch == 0 || record.dev.hits_at_1 > result.best_dev.hits_at_1) {
      result.best_epoch = epoch;
      result.best_dev = record.dev;
      best.CopyValuesFrom(model.params());
      since_best = 0;
      if (!config.checkpoint_path.empty()) {
        SaveCheckpoint(model.params(), {config.seed, optimizer.step_count()},
                       config.checkpoint_path);
      }
    } else {
      ++since_best;
    }
    if (record.dev.hits_at_1 >= config.target_hits ||
        (config.patience > 0 && since_best >= config.patience)) {
      result.stopped_early = i < config.epochs;
      break;
    }
  }
  if (result.best_epoch > 0) model.params().CopyValuesFrom(best);
  return result;
}

}  // namespace reifkb
