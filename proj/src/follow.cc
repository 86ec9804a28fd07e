#include "reifkb/follow.h"

#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

namespace {

void CheckMixShapes(const Matrix& x, const Matrix& r, const KnowledgeBase& kb, const char* what) {
  if (x.rows() != r.rows()) {
    throw ShapeError(std::string(what) + ": batch size mismatch, X is " + x.ShapeString() +
                     " and R is " + r.ShapeString());
  }
  if (x.cols() != kb.FollowInputDim()) {
    throw ShapeError(std::string(what) + ": X has " + std::to_string(x.cols()) +
                     " columns, expected " + std::to_string(kb.FollowInputDim()));
  }
  if (r.cols() != kb.num_relations()) {
    throw ShapeError(std::string(what) + ": R has " + std::to_string(r.cols()) +
                     " columns, expected " + std::to_string(kb.num_relations()));
  }
}

// dR[:, k] = rowsum((X M_k) (.) g), shared by both mixing strategies.
Matrix RelationGradient(const Matrix& x, const Matrix& g, const KnowledgeBase& kb) {
  Matrix dr(x.rows(), kb.num_relations());
  for (RelationId k = 0; k < kb.num_relations(); ++k) {
    Matrix p = SpMM(x, kb.RelationMatrix(k));
    for (std::size_t b = 0; b < x.rows(); ++b) {
      double acc = 0.0;
      auto prow = p.row(b);
      auto grow = g.row(b);
      for (std::size_t j = 0; j < prow.size(); ++j) acc += prow[j] * grow[j];
      dr(b, k) = acc;
    }
  }
  return dr;
}

}  // namespace

CooMatrix MixRelations(const KnowledgeBase& kb, std::span<const double> r, OpCounts* counts) {
  if (r.size() != kb.num_relations()) {
    throw ShapeError("MixRelations: relation vector of length " + std::to_string(r.size()) +
                     " for " + std::to_string(kb.num_relations()) + " relations");
  }
  CooMatrix mixed(kb.FollowInputDim(), kb.FollowOutputDim());
  for (RelationId k = 0; k < kb.num_relations(); ++k) {
    mixed = SparseAdd(mixed, kb.RelationCoo(k), r[k]);
  }
  if (counts != nullptr) counts->sparse_adds += kb.num_relations();
  return mixed;
}

Matrix FollowNaive(const Matrix& x, const Matrix& r, const KnowledgeBase& kb, OpCounts* counts) {
  if (x.rows() != 1 || r.rows() != 1) {
    throw UnsupportedBatchError(
        "naive mixing follows one example at a time; use late mixing or the reified KB for "
        "minibatches");
  }
  CheckMixShapes(x, r, kb, "FollowNaive");
  CooMatrix mixed = MixRelations(kb, r.row(0), counts);
  Matrix out = SpMMCoo(x, mixed);
  if (counts != nullptr) {
    counts->sp_dense_matmuls += 1;
    counts->NotePeak(x.size() + r.size() + out.size());
  }
  return out;
}

Matrix FollowLate(const Matrix& x, const Matrix& r, const KnowledgeBase& kb, OpCounts* counts) {
  CheckMixShapes(x, r, kb, "FollowLate");
  Matrix out(x.rows(), kb.FollowOutputDim());
  for (RelationId k = 0; k < kb.num_relations(); ++k) {
    Matrix product = SpMM(x, kb.RelationMatrix(k));
    AddColumnScaledInPlace(&out, r, k, product);
  }
  if (counts != nullptr) {
    counts->sp_dense_matmuls += kb.num_relations();
    counts->dense_add_or_hadamard += kb.num_relations();
    std::size_t temp = kb.num_relations() > 0 ? x.rows() * kb.FollowOutputDim() : 0;
    counts->NotePeak(x.size() + r.size() + out.size() + temp);
  }
  return out;
}

std::set<Index> RNeighborsOracle(const KnowledgeBase& kb, const std::set<Index>& entities,
                                 const std::set<RelationId>& relations) {
  for (RelationId r : relations) {
    if (r >= kb.num_relations()) throw LookupError("unknown relation index " + std::to_string(r));
  }
  std::set<Index> out;
  for (const Triple& t : kb.triples()) {
    if (relations.count(t.rel) && entities.count(t.subj) && t.weight > 0.0) out.insert(t.obj);
  }
  return out;
}

std::string StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kNaiveMixing: return "naive";
    case Strategy::kLateMixing: return "late";
    case Strategy::kReified: return "reified";
    case Strategy::kSharded: return "sharded";
  }
  return "unknown";
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "naive") return Strategy::kNaiveMixing;
  if (name == "late") return Strategy::kLateMixing;
  if (name == "reified") return Strategy::kReified;
  if (name == "sharded") return Strategy::kSharded;
  throw ConfigError("unknown strategy '" + name + "' (naive, late, reified, sharded)");
}

std::shared_ptr<const FollowEngine> FollowEngine::Create(std::shared_ptr<const KnowledgeBase> kb,
                                                         Strategy strategy, Options options) {
  auto engine = std::shared_ptr<FollowEngine>(new FollowEngine());
  engine->input_dim_ = kb->FollowInputDim();
  engine->output_dim_ = kb->FollowOutputDim();
  engine->strategy_ = strategy;
  engine->options_ = options;
  if (strategy == Strategy::kReified || strategy == Strategy::kSharded) {
    engine->rkb_ = std::make_shared<const ReifiedKB>(Reify(*kb));
  }
  if (strategy == Strategy::kSharded) {
    engine->skb_ = std::make_shared<const ShardedReifiedKB>(Shard(*engine->rkb_, options.shards));
  }
  engine->kb_ = std::move(kb);
  return engine;
}

std::shared_ptr<const FollowEngine> FollowEngine::CreateReified(
    std::shared_ptr<const KnowledgeBase> kb, std::shared_ptr<const ReifiedKB> rkb) {
  if (rkb->fingerprint() != kb->fingerprint()) {
    throw ConsistencyError("reified KB fingerprint " + HexDigest(rkb->fingerprint()) +
                           " does not match knowledge base " + HexDigest(kb->fingerprint()));
  }
  auto engine = std::shared_ptr<FollowEngine>(new FollowEngine());
  engine->input_dim_ = kb->FollowInputDim();
  engine->output_dim_ = kb->FollowOutputDim();
  engine->strategy_ = Strategy::kReified;
  engine->rkb_ = std::move(rkb);
  engine->kb_ = std::move(kb);
  return engine;
}

Matrix FollowEngine::Follow(const Matrix& x, const Matrix& r, OpCounts* counts) const {
  switch (strategy_) {
    case Strategy::kNaiveMixing: return FollowNaive(x, r, *kb_, counts);
    case Strategy::kLateMixing: return FollowLate(x, r, *kb_, counts);
    case Strategy::kReified: return FollowReified(x, r, *rkb_, counts);
    case Strategy::kSharded: return FollowSharded(x, r, *skb_, options_.parallel_shards, counts);
  }
  throw ConfigError("unknown strategy");
}

void FollowEngine::Backward(const Matrix& x, const Matrix& r, const Matrix& g, Matrix* dx,
                            Matrix* dr) const {
  switch (strategy_) {
    case Strategy::kReified:
      FollowReifiedBackward(x, r, g, *rkb_, dx, dr);
      return;
    case Strategy::kSharded:
      FollowShardedBackward(x, r, g, *skb_, options_.parallel_shards, dx, dr);
      return;
    case Strategy::kNaiveMixing:
    case Strategy::kLateMixing:
      break;
  }
  CheckMixShapes(x, r, *kb_, "FollowEngine::Backward");
  if (g.rows() != x.rows() || g.cols() != output_dim_) {
    throw ShapeError("FollowEngine::Backward: upstream gradient " + g.ShapeString());
  }
  if (dx != nullptr) {
    // dX = sum_k R[:, k] (.) (g M_k^T)
    Matrix out(x.rows(), input_dim_);
    for (RelationId k = 0; k < kb_->num_relations(); ++k) {
      AddColumnScaledInPlace(&out, r, k, SpMM(g, kb_->RelationMatrix(k), /*transpose=*/true));
    }
    *dx = std::move(out);
  }
  if (dr != nullptr) *dr = RelationGradient(x, g, *kb_);
}

Matrix FollowChain(const Matrix& x0, std::span<const Matrix> relations,
                   const FollowEngine& engine, std::vector<Matrix>* hops) {
  if (relations.empty()) throw ArgumentError("FollowChain needs at least one hop");
  if (hops != nullptr) hops->clear();
  Matrix x = x0;
  for (const Matrix& r : relations) {
    x = engine.Follow(x, r);
    if (hops != nullptr) hops->push_back(x);
  }
  return x;
}

}  // namespace reifkb
