#ifndef REIFKB_MODELS_H_
#define REIFKB_MODELS_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "reifkb/autograd.h"
#include "reifkb/follow.h"
#include "reifkb/gradcheck.h"
#include "reifkb/kb.h"
#include "reifkb/params.h"

namespace reifkb {

// One training or evaluation example. For KB completion the question is the
// query relation, stored as the single token `tokens[0]`.
struct Example {
  std::vector<Index> tokens;
  std::vector<Index> seeds;
  std::vector<Index> answers;
  int hops = 0;  // generator metadata; never read by the models

  bool operator==(const Example&) const = default;
};

using ExampleBatch = std::span<const Example* const>;

enum class HeadActivation { kSoftmax, kSigmoid };

// Architecture and size settings shared by all task models; each model
// reads the fields it needs.
struct ModelSpec {
  std::string task;  // multihop | cvt | kbc | chain
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  std::size_t hops = 2;    // T
  std::size_t chains = 2;  // N, kbc only
  bool mask_seeds = false;
  StopMode stop_mode = StopMode::kAbsorbLast;
  HeadActivation activation = HeadActivation::kSoftmax;
  bool mask_query_relation = true;  // kbc: never follow the queried relation
  std::string entity_type = "entity";
  std::string cvt_type = "cvt";
  Strategy strategy = Strategy::kReified;
  std::uint64_t seed = 0;
};

// x (.) (1 - clamp01(x0)). Zeroes seed scores and leaves the rest unchanged.
Matrix MaskSeeds(const Matrix& xt, const Matrix& x0);

// A trainable model mapping a batch of examples to pre-softmax entity
// scores. The prediction is softmax(scores); the loss is cross entropy
// against the uniform distribution over the answers.
class Model {
 public:
  virtual ~Model() = default;

  const ModelSpec& spec() const { return spec_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  virtual std::size_t output_dim() const = 0;

  // Records the forward pass on `tape`; returns b x output_dim scores.
  virtual Var Scores(Tape& tape, ExampleBatch batch) const = 0;
  Var Loss(Tape& tape, ExampleBatch batch) const;

 protected:
  explicit Model(ModelSpec spec) : spec_(std::move(spec)) {}
  Matrix SeedMatrix(ExampleBatch batch, std::size_t dim) const;

  ModelSpec spec_;
  ParamStore params_;
};

// Mean-pooled question encoding and one linear relation head per hop:
// r^t = softmax(W_t q + b_t), x^t = follow(x^{t-1}, r^t).
class MultiHopModel : public Model {
 public:
  MultiHopModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine);
  std::size_t output_dim() const override { return engine_->output_dim(); }
  Var Scores(Tape& tape, ExampleBatch batch) const override;

 private:
  std::shared_ptr<const FollowEngine> engine_;
};

// Typed KB with entity and CVT types. Three heads pick relations for the
// E->E, E->CVT and CVT->E signatures:
//   follow(follow(x, r_ec), r_ce) + follow(x, r_ee).
class CvtModel : public Model {
 public:
  // SchemaError if the KB has a relation outside the three signatures.
  CvtModel(ModelSpec spec, std::shared_ptr<const KnowledgeBase> kb);
  std::size_t output_dim() const override { return ee_->output_dim(); }
  Var Scores(Tape& tape, ExampleBatch batch) const override;

  // The same combination with explicit relation vectors.
  Matrix Combine(const Matrix& x, const Matrix& r_ee, const Matrix& r_ec,
                 const Matrix& r_ce) const;
  const FollowEngine& ee() const { return *ee_; }
  const FollowEngine& ec() const { return *ec_; }
  const FollowEngine& ce() const { return *ce_; }

 private:
  std::shared_ptr<const FollowEngine> ee_, ec_, ce_;
};

// KB completion: N chains of T steps sharing a query-relation embedding.
// x_i^t = follow(x_i^{t-1}, r_i^t) + x_i^{t-1}; scores are sum_i x_i^T.
class KbcModel : public Model {
 public:
  KbcModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine);
  std::size_t output_dim() const override { return engine_->output_dim(); }
  Var Scores(Tape& tape, ExampleBatch batch) const override;

  // Relation weights r_i^t as used by Scores: heads[i][t] is b x N_R.
  std::vector<std::vector<Matrix>> Heads(ExampleBatch batch) const;
  const FollowEngine& engine() const { return *engine_; }

 private:
  std::vector<std::vector<Var>> BuildHeads(Tape& tape, ExampleBatch batch) const;
  std::shared_ptr<const FollowEngine> engine_;
};

// One KBC chain evaluated step by step: x^t = follow(x^{t-1}, r^t) + x^{t-1}.
Matrix KbcChainRecursive(const Matrix& x0, std::span<const Matrix> relations,
                         const FollowEngine& engine);

// The same chain as an explicit sum over every subsequence of the steps,
// each applied in order: for T = 2, f2(f1(x)) + f2(x) + f1(x) + x.
Matrix KbcChainExpanded(const Matrix& x0, std::span<const Matrix> relations,
                        const FollowEngine& engine);

// LSTM encoder over the tokens and an LSTM decoder that emits one relation
// distribution and one stop probability per step:
//   p^t = sigmoid(f_p(h^{t-1})), r^t = softmax(f_r(h^{t-1})),
//   x^t = follow(x^{t-1}, r^t), h^t = LSTM(h^{t-1}, r^{t-1}), r^0 = 0.
// Scores mix x^1..x^T by stop weights (see StopMode).
class ChainDecoderModel : public Model {
 public:
  ChainDecoderModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine);
  std::size_t output_dim() const override { return engine_->output_dim(); }
  Var Scores(Tape& tape, ExampleBatch batch) const override;

  // Per-step stop probabilities and relation distributions of the last
  // Scores call on `tape` are not retained; this recomputes them.
  struct Trace {
    std::vector<Matrix> stop;       // T matrices b x 1
    std::vector<Matrix> relations;  // T matrices b x N_R
  };
  Trace Decode(ExampleBatch batch) const;

 private:
  Var Run(Tape& tape, ExampleBatch batch, Trace* trace) const;
  std::shared_ptr<const FollowEngine> engine_;
};

// Builds the model named by spec.task over `kb` (typed for cvt).
std::unique_ptr<Model> CreateModel(const ModelSpec& spec, std::shared_ptr<const KnowledgeBase> kb);

// Finite-difference check of the model's loss on one batch.
GradCheckReport GradCheckModel(Model& model, ExampleBatch batch, const GradCheckOptions& options);

}  // namespace reifkb

#endif  // REIFKB_MODELS_H_
