#ifndef REIFKB_AUTOGRAD_H_
#define REIFKB_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/follow.h"
#include "reifkb/params.h"
#include "reifkb/sparse.h"

namespace reifkb {

// Handle to a node of a Tape.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

// How the chain decoder distributes the probability of never stopping.
enum class StopMode {
  kRaw,          // w_t = p_t prod_{t'<t} (1 - p_t'); leftover mass dropped
  kAbsorbLast,   // leftover mass added to the last hop
  kRenormalize,  // raw weights divided by their sum
};

// Reverse-mode tape over the fixed operation set used by the task models.
// Nodes are appended in evaluation order and Backward visits them in exact
// reverse order. Every forward value and every propagated gradient is
// checked for NaN/Inf; a failure raises NumericsError naming the op.
//
// All matrices are row-major b x d batches unless stated otherwise.
class Tape {
 public:
  explicit Tape(ParamStore* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Var Constant(Matrix value);
  // Reads a parameter; its gradient accumulates into the store on Backward.
  Var Param(const std::string& name);

  const Matrix& value(Var v) const;
  // Gradient of the last Backward; zero-shaped before any flows in.
  const Matrix& grad(Var v) const;
  std::size_t size() const { return nodes_.size(); }
  const std::string& op_name(Var v) const;
  // Value of a 1x1 node. Cross entropy keeps its reduction in long double
  // so finite differences of the loss are not limited by the final rounding.
  long double ExtendedScalar(Var v) const;

  // Seeds d(loss) = 1 for a 1x1 loss and runs the reverse sweep.
  void Backward(Var loss);
  // Same with an explicit upstream gradient of the output's shape.
  void Backward(Var out, const Matrix& upstream);

  // x W + b with W: in x out and b: 1 x out broadcast over rows.
  Var Linear(Var x, Var w, Var b);
  Var MatMul(Var a, Var b);
  Var Add(Var a, Var b);
  Var Hadamard(Var a, Var b);
  // alpha * a + beta, elementwise.
  Var Scale(Var a, double alpha, double beta = 0.0);
  // Row i of a multiplied by s(i, 0); s is b x 1.
  Var ScaleRows(Var a, Var s);
  Var ConcatCols(const std::vector<Var>& parts);
  Var SliceCols(Var a, std::size_t begin, std::size_t end);
  // Row-wise softmax.
  Var Softmax(Var logits);
  Var Sigmoid(Var a);
  Var Tanh(Var a);
  // Mean over the batch of the cross entropy between softmax(logits) and
  // the uniform distribution over each row's answer set. Returns 1x1.
  Var CrossEntropyUniform(Var logits, const std::vector<std::vector<Index>>& answers);
  // Row i = mean of table rows listed in ids[i] (a lookup when one id).
  Var MeanPool(Var table, const std::vector<std::vector<Index>>& ids);
  // Fused LSTM cell. x: b x in, h, c: b x hid, w: (in + hid) x 4hid,
  // b: 1 x 4hid with gate blocks (input, forget, output, candidate). A
  // constant forget bias is added to the forget gate. Returns [h' | c'].
  Var LstmCell(Var x, Var h, Var c, Var w, Var b, double forget_bias = 1.0);
  // Relation-set following with the engine's vector-Jacobian product.
  Var Follow(Var x, Var r, const FollowEngine& engine);
  // sum_t w_t xs[t] with stop weights from ps[t] (each b x 1).
  Var StopMixture(const std::vector<Var>& xs, const std::vector<Var>& ps, StopMode mode);

 private:
  struct Node {
    std::string op;
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    std::function<void()> backward;
    std::optional<long double> extended;
  };

  Var Push(std::string op, Matrix value, std::vector<Var> inputs,
           std::function<void()> backward);
  Node& node(Var v);
  const Node& node(Var v) const;
  bool needs(Var v) const { return node(v).requires_grad; }
  // grad(v) += g, allocating on first use.
  void Accumulate(Var v, const Matrix& g);

  ParamStore* params_;
  std::vector<Node> nodes_;
  std::size_t current_ = 0;  // node whose backward is running
};

// Stop-probability mixture weights for one example. Exposed for tests.
std::vector<double> StopWeights(const std::vector<double>& p, StopMode mode);

}  // namespace reifkb

#endif  // REIFKB_AUTOGRAD_H_
