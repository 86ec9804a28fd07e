#ifndef REIFKB_FOLLOW_H_
#define REIFKB_FOLLOW_H_

#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/kb.h"
#include "reifkb/op_counts.h"
#include "reifkb/reified.h"
#include "reifkb/sparse.h"

namespace reifkb {

// Relation-set following: given a weighted entity set x and a weighted
// relation set r, follow(x, r) = x * sum_k r[k] M_k. The three strategies
// below compute the same function with different cost profiles.

// M_R = sum_k r[k] M_k as one sparse matrix, built with N_R sparse additions.
// SchemaError if the relations are not type-compatible.
CooMatrix MixRelations(const KnowledgeBase& kb, std::span<const double> r,
                       OpCounts* counts = nullptr);

// Naive mixing: materialise M_R, then one sparse-dense product. Only a
// single example (x and r are 1-row); a batch raises UnsupportedBatchError.
Matrix FollowNaive(const Matrix& x, const Matrix& r, const KnowledgeBase& kb,
                   OpCounts* counts = nullptr);

// Late mixing: sum_k R[:, k] (.) (X M_k), one relation product live at a time.
Matrix FollowLate(const Matrix& x, const Matrix& r, const KnowledgeBase& kb,
                  OpCounts* counts = nullptr);

// Brute-force R-neighbors(X) over the triple list. Ground truth for tests.
std::set<Index> RNeighborsOracle(const KnowledgeBase& kb, const std::set<Index>& entities,
                                 const std::set<RelationId>& relations);

enum class Strategy { kNaiveMixing, kLateMixing, kReified, kSharded };

std::string StrategyName(Strategy s);
Strategy ParseStrategy(const std::string& name);

// A following strategy bound to one KB. Holds the reified (and optionally
// sharded) form when the strategy needs it. Immutable and shareable.
class FollowEngine {
 public:
  struct Options {
    std::size_t shards = 1;        // kSharded only
    bool parallel_shards = false;  // kSharded only
  };

  static std::shared_ptr<const FollowEngine> Create(std::shared_ptr<const KnowledgeBase> kb,
                                                    Strategy strategy, Options options);
  static std::shared_ptr<const FollowEngine> Create(std::shared_ptr<const KnowledgeBase> kb,
                                                    Strategy strategy) {
    return Create(std::move(kb), strategy, Options{});
  }
  // Uses a prebuilt reified KB; ConsistencyError if it was built from a
  // different KB.
  static std::shared_ptr<const FollowEngine> CreateReified(
      std::shared_ptr<const KnowledgeBase> kb, std::shared_ptr<const ReifiedKB> rkb);

  Matrix Follow(const Matrix& x, const Matrix& r, OpCounts* counts = nullptr) const;

  // Vector-Jacobian product for upstream gradient g of follow(x, r).
  // Reified strategies work in triple space; the mixing strategies loop
  // over relations.
  void Backward(const Matrix& x, const Matrix& r, const Matrix& g, Matrix* dx,
                Matrix* dr) const;

  Strategy strategy() const { return strategy_; }
  const KnowledgeBase& kb() const { return *kb_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  std::size_t num_relations() const { return kb_->num_relations(); }

 private:
  FollowEngine() = default;

  std::shared_ptr<const KnowledgeBase> kb_;
  Strategy strategy_ = Strategy::kReified;
  Options options_;
  std::shared_ptr<const ReifiedKB> rkb_;
  std::shared_ptr<const ShardedReifiedKB> skb_;
  std::size_t input_dim_ = 0;
  std::size_t output_dim_ = 0;
};

// Left-to-right composition follow(...follow(x0, r1)..., rT). When `hops`
// is non-null it receives every intermediate output x1..xT.
Matrix FollowChain(const Matrix& x0, std::span<const Matrix> relations,
                   const FollowEngine& engine, std::vector<Matrix>* hops = nullptr);

}  // namespace reifkb

#endif  // REIFKB_FOLLOW_H_
