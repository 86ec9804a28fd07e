#ifndef REIFKB_TRAIN_H_
#define REIFKB_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "reifkb/models.h"
#include "reifkb/optim.h"

namespace reifkb {

// Indices of the k largest scores ordered by (score desc, index asc).
std::vector<Index> TopK(std::span<const double> scores, std::size_t k);

// True when one of the top-k entities is an answer.
bool HitAtK(std::span<const double> scores, std::span<const Index> answers, std::size_t k);

struct Metrics {
  double hits_at_1 = 0.0;
  double hits_at_k = 0.0;
  double mean_loss = 0.0;
  std::size_t k = 1;
  std::size_t count = 0;
};

// DatasetError on an empty dataset.
Metrics Evaluate(const Model& model, std::span<const Example> data, std::size_t k,
                 std::size_t batch_size = 64);

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::size_t patience = 3;  // epochs without dev Hits@1 improvement
  double target_hits = 1.1;  // stop once dev Hits@1 reaches this
  std::size_t eval_k = 10;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
  // Hop curriculum: when > 0, first train this many epochs on examples with
  // hops <= 1, then <= 2, ... up to the largest hop count minus one, before
  // the regular epochs on the full set. Early stopping and best-epoch
  // selection apply to the regular epochs only.
  std::size_t curriculum_epochs = 0;
  // When set, the best parameters so far are written here after every
  // improvement, so a later numerics failure leaves the last good state.
  std::string checkpoint_path;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t max_hops = 0;  // curriculum stage; 0 for the full set
  double train_loss = 0.0;
  Metrics dev;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  Metrics best_dev;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Minibatch training with a seeded per-epoch shuffle. The model ends with
// the parameters of the best dev epoch. NumericsError on a non-finite loss
// or gradient.
TrainResult Train(Model& model, std::span<const Example> train, std::span<const Example> dev,
                  const TrainConfig& config, const EpochCallback& on_epoch = nullptr);

}  // namespace reifkb

#endif  // REIFKB_TRAIN_H_
