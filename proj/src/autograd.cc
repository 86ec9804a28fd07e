#include "reifkb/autograd.h"

#include <cmath>

#include "reifkb/errors.h"

namespace reifkb {

namespace {

double SigmoidScalar(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix ColumnSums(const Matrix& g) {
  Matrix out(1, g.cols());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    auto row = g.row(i);
    for (std::size_t j = 0; j < g.cols(); ++j) out(0, j) += row[j];
  }
  return out;
}

// d w_t / d p_j for the raw or absorb-last weights of one example.
std::vector<std::vector<double>> StopJacobian(const std::vector<double>& p, bool absorb_last) {
  const std::size_t T = p.size();
  std::vector<std::vector<double>> jac(T, std::vector<double>(T, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    const bool last_absorbs = absorb_last && t + 1 == T;
    for (std::size_t j = 0; j <= t; ++j) {
      if (j == t) {
        if (last_absorbs) continue;
        double prod = 1.0;
        for (std::size_t k = 0; k < t; ++k) prod *= 1.0 - p[k];
        jac[t][j] = prod;
      } else {
        double prod = last_absorbs ? 1.0 : p[t];
        for (std::size_t k = 0; k < t; ++k)
          if (k != j) prod *= 1.0 - p[k];
        jac[t][j] = -prod;
      }
    }
  }
  return jac;
}

}  // namespace

std::vector<double> StopWeights(const std::vector<double>& p, StopMode mode) {
  std::vector<double> w(p.size());
  double survive = 1.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    // p_T S + (1 - p_T) S is S exactly; computed directly so the last weight
    // does not depend on p_T even through rounding.
    w[t] = mode == StopMode::kAbsorbLast && t + 1 == p.size() ? survive : p[t] * survive;
    survive *= 1.0 - p[t];
  }
  if (mode == StopMode::kRenormalize && !p.empty()) {
    double z = 0.0;
    for (double v : w) z += v;
    for (double& v : w) v /= z;
  }
  return w;
}

Tape::Node& Tape::node(Var v) {
  if (v.id >= nodes_.size()) throw ArgumentError("invalid tape variable");
  return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw ArgumentError("invalid tape variable");
  return nodes_[v.id];
}

const Matrix& Tape::value(Var v) const { return node(v).value; }
const Matrix& Tape::grad(Var v) const { return node(v).grad; }
const std::string& Tape::op_name(Var v) const { return node(v).op; }

long double Tape::ExtendedScalar(Var v) const {
  const Node& n = node(v);
  if (n.value.rows() != 1 || n.value.cols() != 1) {
    throw ShapeError("ExtendedScalar: node is " + n.value.ShapeString());
  }
  return n.extended ? *n.extended : n.value(0, 0);
}

Var Tape::Push(std::string op, Matrix value, std::vector<Var> inputs,
               std::function<void()> backward) {
  if (!AllFinite(value)) {
    throw NumericsError("forward of op '" + op + "' (node " + std::to_string(nodes_.size()) +
                        ") produced a non-finite value");
  }
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  for (Var in : inputs) n.requires_grad = n.requires_grad || needs(in);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::Accumulate(Var v, const Matrix& g) {
  Node& n = node(v);
  if (!n.requires_grad) return;
  if (!AllFinite(g)) {
    throw NumericsError("backward of op '" + nodes_[current_].op + "' (node " +
                        std::to_string(current_) + ") produced a non-finite gradient");
  }
  if (n.grad.empty()) {
    CheckSameShape(n.value, g, "Tape::Accumulate");
    n.grad = g;
  } else {
    AddInPlace(&n.grad, g);
  }
}

Var Tape::Constant(Matrix value) { return Push("constant", std::move(value), {}, nullptr); }

Var Tape::Param(const std::string& name) {
  if (params_ == nullptr) throw ConfigError("tape has no parameter store");
  Parameter& p = params_->Get(name);
  Var v = Push("param:" + name, p.value, {}, nullptr);
  nodes_[v.id].requires_grad = true;
  nodes_[v.id].param = &p;
  return v;
}

void Tape::Backward(Var loss) {
  const Matrix& v = value(loss);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ShapeError("Backward needs a 1x1 loss, got " + v.ShapeString());
  }
  Backward(loss, Matrix(1, 1, 1.0));
}

void Tape::Backward(Var out, const Matrix& upstream) {
  CheckSameShape(value(out), upstream, "Tape::Backward");
  for (Node& n : nodes_) n.grad = Matrix();
  current_ = out.id;
  Accumulate(out, upstream);
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty()) continue;
    current_ = i;
    if (n.backward) n.backward();
    if (n.param != nullptr) AddInPlace(&n.param->grad, nodes_[i].grad);
  }
}

Var Tape::Linear(Var x, Var w, Var b) {
  const Matrix& xv = value(x);
  const Matrix& wv = value(w);
  const Matrix& bv = value(b);
  if (bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw ShapeError("Linear: bias " + bv.ShapeString() + " for weight " + wv.ShapeString());
  }
  Matrix out = reifkb::MatMul(xv, wv);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bv(0, j);
  }
  const std::size_t self = nodes_.size();
  return Push("linear", std::move(out), {x, w, b}, [this, self, x, w, b] {
    const Matrix& g = nodes_[self].grad;
    if (needs(x)) Accumulate(x, MatMulTB(g, value(w)));
    if (needs(w)) Accumulate(w, MatMulTA(value(x), g));
    if (needs(b)) Accumulate(b, ColumnSums(g));
  });
}

Var Tape::MatMul(Var a, Var b) {
  Matrix out = reifkb::MatMul(value(a), value(b));
  const std::size_t self = nodes_.size();
  return Push("matmul", std::move(out), {a, b}, [this, self, a, b] {
    const Matrix& g = nodes_[self].grad;
    if (needs(a)) Accumulate(a, MatMulTB(g, value(b)));
    if (needs(b)) Accumulate(b, MatMulTA(value(a), g));
  });
}

Var Tape::Add(Var a, Var b) {
  CheckSameShape(value(a), value(b), "Tape::Add");
  Matrix out = value(a);
  AddInPlace(&out, value(b));
  const std::size_t self = nodes_.size();
  return Push("add", std::move(out), {a, b}, [this, self, a, b] {
    Matrix g = nodes_[self].grad;
    Accumulate(a, g);
    Accumulate(b, g);
  });
}

Var Tape::Hadamard(Var a, Var b) {
  Matrix out = reifkb::Hadamard(value(a), value(b));
  const std::size_t self = nodes_.size();
  return Push("hadamard", std::move(out), {a, b}, [this, self, a, b] {
    const Matrix& g = nodes_[self].grad;
    if (needs(a)) Accumulate(a, reifkb::Hadamard(g, value(b)));
    if (needs(b)) Accumulate(b, reifkb::Hadamard(g, value(a)));
  });
}

Var Tape::Scale(Var a, double alpha, double beta) {
  Matrix out = value(a);
  for (double& v : out.data()) v = alpha * v + beta;
  const std::size_t self = nodes_.size();
  return Push("scale", std::move(out), {a}, [this, self, a, alpha] {
    Matrix g = nodes_[self].grad;
    for (double& v : g.data()) v *= alpha;
    Accumulate(a, g);
  });
}

Var Tape::ScaleRows(Var a, Var s) {
  const Matrix& av = value(a);
  const Matrix& sv = value(s);
  if (sv.rows() != av.rows() || sv.cols() != 1) {
    throw ShapeError("ScaleRows: scale " + sv.ShapeString() + " for " + av.ShapeString());
  }
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (double& v : out.row(i)) v *= sv(i, 0);
  const std::size_t self = nodes_.size();
  return Push("scale_rows", std::move(out), {a, s}, [this, self, a, s] {
    const Matrix& g = nodes_[self].grad;
    const Matrix& av = value(a);
    const Matrix& sv = value(s);
    if (needs(a)) {
      Matrix da = g;
      for (std::size_t i = 0; i < da.rows(); ++i)
        for (double& v : da.row(i)) v *= sv(i, 0);
      Accumulate(a, da);
    }
    if (needs(s)) {
      Matrix ds(sv.rows(), 1);
      for (std::size_t i = 0; i < av.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < av.cols(); ++j) acc += g(i, j) * av(i, j);
        ds(i, 0) = acc;
      }
      Accumulate(s, ds);
    }
  });
}

Var Tape::ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("ConcatCols needs at least one input");
  const std::size_t rows = value(parts[0]).rows();
  std::size_t cols = 0;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw ShapeError("ConcatCols: row count mismatch");
    cols += value(p).cols();
  }
  Matrix out(rows, cols);
  std::size_t offset = 0;
  for (Var p : parts) {
    const Matrix& pv = value(p);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < pv.cols(); ++j) out(i, offset + j) = pv(i, j);
    offset += pv.cols();
  }
  const std::size_t self = nodes_.size();
  return Push("concat_cols", std::move(out), parts, [this, self, parts] {
    const Matrix& g = nodes_[self].grad;
    std::size_t offset = 0;
    for (Var p : parts) {
      const std::size_t c = value(p).cols();
      if (needs(p)) {
        Matrix gp(g.rows(), c);
        for (std::size_t i = 0; i < g.rows(); ++i)
          for (std::size_t j = 0; j < c; ++j) gp(i, j) = g(i, offset + j);
        Accumulate(p, gp);
      }
      offset += c;
    }
  });
}

Var Tape::SliceCols(Var a, std::size_t begin, std::size_t end) {
  const Matrix& av = value(a);
  if (begin > end || end > av.cols()) {
    throw ShapeError("SliceCols: [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") of " + av.ShapeString());
  }
  Matrix out(av.rows(), end - begin);
  for (std::size_t i = 0; i < av.rows(); ++i)
    for (std::size_t j = begin; j < end; ++j) out(i, j - begin) = av(i, j);
  const std::size_t self = nodes_.size();
  return Push("slice_cols", std::move(out), {a}, [this, self, a, begin] {
    const Matrix& g = nodes_[self].grad;
    Matrix ga(value(a).rows(), value(a).cols());
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) ga(i, begin + j) = g(i, j);
    Accumulate(a, ga);
  });
}

Var Tape::Softmax(Var logits) {
  Matrix out = value(logits);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    double mx = -INFINITY;
    for (double v : row) mx = std::max(mx, v);
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : row) v /= z;
  }
  const std::size_t self = nodes_.size();
  return Push("softmax", std::move(out), {logits}, [this, self, logits] {
    const Matrix& g = nodes_[self].grad;
    const Matrix& y = nodes_[self].value;
    Matrix dx(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
      for (std::size_t j = 0; j < y.cols(); ++j) dx(i, j) = y(i, j) * (g(i, j) - dot);
    }
    Accumulate(logits, dx);
  });
}

Var Tape::Sigmoid(Var a) {
  Matrix out = value(a);
  for (double& v : out.data()) v = SigmoidScalar(v);
  const std::size_t self = nodes_.size();
  return Push("sigmoid", std::move(out), {a}, [this, self, a] {
    Matrix dx = nodes_[self].grad;
    const Matrix& y = nodes_[self].value;
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data()[i] *= y.data()[i] * (1.0 - y.data()[i]);
    Accumulate(a, dx);
  });
}

Var Tape::Tanh(Var a) {
  Matrix out = value(a);
  for (double& v : out.data()) v = std::tanh(v);
  const std::size_t self = nodes_.size();
  return Push("tanh", std::move(out), {a}, [this, self, a] {
    Matrix dx = nodes_[self].grad;
    const Matrix& y = nodes_[self].value;
    for (std::size_t i = 0; i < dx.size(); ++i) dx.data()[i] *= 1.0 - y.data()[i] * y.data()[i];
    Accumulate(a, dx);
  });
}

Var Tape::CrossEntropyUniform(Var logits, const std::vector<std::vector<Index>>& answers) {
  const Matrix& z = value(logits);
  if (answers.size() != z.rows()) {
    throw ShapeError("CrossEntropyUniform: " + std::to_string(answers.size()) +
                     " answer sets for a batch of " + std::to_string(z.rows()));
  }
  Matrix probs(z.rows(), z.cols());
  long double total = 0.0L;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    if (answers[i].empty()) throw ArgumentError("CrossEntropyUniform: empty answer set");
    double mx = -INFINITY;
    for (double v : z.row(i)) mx = std::max(mx, v);
    long double sum = 0.0L;
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const long double e = std::exp(static_cast<long double>(z(i, j)) - mx);
      probs(i, j) = static_cast<double>(e);
      sum += e;
    }
    for (double& v : probs.row(i)) v = static_cast<double>(v / sum);
    const long double lse = mx + std::log(sum);
    long double mean_answer = 0.0L;
    for (Index a : answers[i]) {
      if (a >= z.cols()) throw ShapeError("CrossEntropyUniform: answer index out of range");
      mean_answer += z(i, a);
    }
    mean_answer /= static_cast<long double>(answers[i].size());
    total += lse - mean_answer;
  }
  const double batch = static_cast<double>(z.rows());
  const long double loss = total / batch;
  Matrix out(1, 1, static_cast<double>(loss));
  const std::size_t self = nodes_.size();
  Var result = Push("cross_entropy_uniform", std::move(out), {logits},
              [this, self, logits, answers, probs = std::move(probs), batch] {
                const double g = nodes_[self].grad(0, 0);
                Matrix dz = probs;
                for (std::size_t i = 0; i < dz.rows(); ++i) {
                  const double share = 1.0 / static_cast<double>(answers[i].size());
                  for (Index a : answers[i]) dz(i, a) -= share;
                }
                for (double& v : dz.data()) v *= g / batch;
                Accumulate(logits, dz);
              });
  nodes_[result.id].extended = loss;
  return result;
}

Var Tape::MeanPool(Var table, const std::vector<std::vector<Index>>& ids) {
  const Matrix& t = value(table);
  Matrix out(ids.size(), t.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) throw ArgumentError("MeanPool: empty id list in row " + std::to_string(i));
    const double scale = 1.0 / static_cast<double>(ids[i].size());
    for (Index id : ids[i]) {
      if (id >= t.rows()) {
        throw ShapeError("MeanPool: id " + std::to_string(id) + " outside table of " +
                         std::to_string(t.rows()) + " rows");
      }
      auto src = t.row(id);
      auto dst = out.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
    }
  }
  const std::size_t self = nodes_.size();
  return Push("mean_pool", std::move(out), {table}, [this, self, table, ids] {
    const Matrix& g = nodes_[self].grad;
    Matrix dt(value(table).rows(), value(table).cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const double scale = 1.0 / static_cast<double>(ids[i].size());
      for (Index id : ids[i]) {
        auto dst = dt.row(id);
        auto src = g.row(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
      }
    }
    Accumulate(table, dt);
  });
}

Var Tape::LstmCell(Var x, Var h, Var c, Var w, Var b, double forget_bias) {
  const Matrix& xv = value(x);
  const Matrix& hv = value(h);
  const Matrix& cv = value(c);
  const Matrix& wv = value(w);
  const Matrix& bv = value(b);
  const std::size_t batch = xv.rows(), in = xv.cols(), hid = hv.cols();
  if (hv.rows() != batch || !cv.SameShape(hv) || wv.rows() != in + hid ||
      wv.cols() != 4 * hid || bv.rows() != 1 || bv.cols() != 4 * hid) {
    throw ShapeError("LstmCell: x " + xv.ShapeString() + ", h " + hv.ShapeString() + ", c " +
                     cv.ShapeString() + ", w " + wv.ShapeString() + ", b " + bv.ShapeString());
  }
  Matrix xh(batch, in + hid);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < in; ++j) xh(i, j) = xv(i, j);
    for (std::size_t j = 0; j < hid; ++j) xh(i, in + j) = hv(i, j);
  }
  Matrix z = reifkb::MatMul(xh, wv);
  // Gate activations, laid out like z: [i | f | o | g].
  Matrix gates(batch, 4 * hid);
  Matrix c_new(batch, hid);
  Matrix out(batch, 2 * hid);
  for (std::size_t r = 0; r < batch; ++r) {
    for (std::size_t j = 0; j < hid; ++j) {
      const double gi = SigmoidScalar(z(r, j) + bv(0, j));
      const double gf = SigmoidScalar(z(r, hid + j) + bv(0, hid + j) + forget_bias);
      const double go = SigmoidScalar(z(r, 2 * hid + j) + bv(0, 2 * hid + j));
      const double gg = std::tanh(z(r, 3 * hid + j) + bv(0, 3 * hid + j));
      gates(r, j) = gi;
      gates(r, hid + j) = gf;
      gates(r, 2 * hid + j) = go;
      gates(r, 3 * hid + j) = gg;
      const double cn = gf * cv(r, j) + gi * gg;
      c_new(r, j) = cn;
      out(r, j) = go * std::tanh(cn);
      out(r, hid + j) = cn;
    }
  }
  const std::size_t self = nodes_.size();
  return Push("lstm_cell", std::move(out), {x, h, c, w, b},
              [this, self, x, h, c, w, b, in, hid, xh = std::move(xh),
               gates = std::move(gates), c_new = std::move(c_new)] {
                const Matrix& g = nodes_[self].grad;
                const Matrix& cv = value(c);
                const std::size_t batch = g.rows();
                Matrix dz(batch, 4 * hid);
                Matrix dc(batch, hid);
                for (std::size_t r = 0; r < batch; ++r) {
                  for (std::size_t j = 0; j < hid; ++j) {
                    const double gi = gates(r, j), gf = gates(r, hid + j);
                    const double go = gates(r, 2 * hid + j), gg = gates(r, 3 * hid + j);
                    const double tc = std::tanh(c_new(r, j));
                    const double dh = g(r, j);
                    const double dcn = g(r, hid + j) + dh * go * (1.0 - tc * tc);
                    dz(r, j) = dcn * gg * gi * (1.0 - gi);
                    dz(r, hid + j) = dcn * cv(r, j) * gf * (1.0 - gf);
                    dz(r, 2 * hid + j) = dh * tc * go * (1.0 - go);
                    dz(r, 3 * hid + j) = dcn * gi * (1.0 - gg * gg);
                    dc(r, j) = dcn * gf;
                  }
                }
                if (needs(c)) Accumulate(c, dc);
                if (needs(w)) Accumulate(w, MatMulTA(xh, dz));
                if (needs(b)) Accumulate(b, ColumnSums(dz));
                if (needs(x) || needs(h)) {
                  Matrix dxh = MatMulTB(dz, value(w));
                  if (needs(x)) {
                    Matrix dx(batch, in);
                    for (std::size_t r = 0; r < batch; ++r)
                      for (std::size_t j = 0; j < in; ++j) dx(r, j) = dxh(r, j);
                    Accumulate(x, dx);
                  }
                  if (needs(h)) {
                    Matrix dh(batch, hid);
                    for (std::size_t r = 0; r < batch; ++r)
                      for (std::size_t j = 0; j < hid; ++j) dh(r, j) = dxh(r, in + j);
                    Accumulate(h, dh);
                  }
                }
              });
}

Var Tape::Follow(Var x, Var r, const FollowEngine& engine) {
  Matrix out = engine.Follow(value(x), value(r));
  const std::size_t self = nodes_.size();
  const FollowEngine* e = &engine;
  return Push("follow", std::move(out), {x, r}, [this, self, x, r, e] {
    Matrix dx, dr;
    e->Backward(value(x), value(r), nodes_[self].grad, needs(x) ? &dx : nullptr,
                needs(r) ? &dr : nullptr);
    if (needs(x)) Accumulate(x, dx);
    if (needs(r)) Accumulate(r, dr);
  });
}

Var Tape::StopMixture(const std::vector<Var>& xs, const std::vector<Var>& ps, StopMode mode) {
  if (xs.empty() || xs.size() != ps.size()) {
    throw ArgumentError("StopMixture needs one stop probability per hop");
  }
  const std::size_t T = xs.size();
  const std::size_t batch = value(xs[0]).rows(), dim = value(xs[0]).cols();
  for (std::size_t t = 0; t < T; ++t) {
    if (value(xs[t]).rows() != batch || value(xs[t]).cols() != dim ||
        value(ps[t]).rows() != batch || value(ps[t]).cols() != 1) {
      throw ShapeError("StopMixture: inconsistent hop shapes");
    }
  }
  Matrix weights(batch, T);
  Matrix out(batch, dim);
  for (std::size_t i = 0; i < batch; ++i) {
    std::vector<double> p(T);
    for (std::size_t t = 0; t < T; ++t) p[t] = value(ps[t])(i, 0);
    std::vector<double> w = StopWeights(p, mode);
    for (std::size_t t = 0; t < T; ++t) {
      weights(i, t) = w[t];
      auto xr = value(xs[t]).row(i);
      auto orow = out.row(i);
      for (std::size_t j = 0; j < dim; ++j) orow[j] += w[t] * xr[j];
    }
  }
  std::vector<Var> inputs = xs;
  inputs.insert(inputs.end(), ps.begin(), ps.end());
  const std::size_t self = nodes_.size();
  return Push("stop_mixture", std::move(out), inputs,
              [this, self, xs, ps, mode, weights = std::move(weights)] {
                const Matrix& g = nodes_[self].grad;
                const Matrix& y = nodes_[self].value;
                const std::size_t T = xs.size(), batch = g.rows(), dim = g.cols();
                std::vector<Matrix> dps(T, Matrix(batch, 1));
                for (std::size_t i = 0; i < batch; ++i) {
                  std::vector<double> p(T);
                  for (std::size_t t = 0; t < T; ++t) p[t] = value(ps[t])(i, 0);
                  // dL/dw_t for the weights actually applied.
                  std::vector<double> dw(T, 0.0);
                  for (std::size_t t = 0; t < T; ++t) {
                    auto xr = value(xs[t]).row(i);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < dim; ++j) {
                      acc += g(i, j) * (mode == StopMode::kRenormalize ? xr[j] - y(i, j) : xr[j]);
                    }
                    dw[t] = acc;
                  }
                  if (mode == StopMode::kRenormalize) {
                    double z = 0.0;
                    for (double w : StopWeights(p, StopMode::kRaw)) z += w;
                    for (double& v : dw) v /= z;
                  }
                  auto jac = StopJacobian(p, mode == StopMode::kAbsorbLast);
                  for (std::size_t j = 0; j < T; ++j) {
                    double acc = 0.0;
                    for (std::size_t t = j; t < T; ++t) acc += dw[t] * jac[t][j];
                    dps[j](i, 0) = acc;
                  }
                }
                for (std::size_t t = 0; t < T; ++t) {
                  if (needs(xs[t])) {
                    Matrix dx = g;
                    for (std::size_t i = 0; i < batch; ++i)
                      for (double& v : dx.row(i)) v *= weights(i, t);
                    Accumulate(xs[t], dx);
                  }
                  if (needs(ps[t])) Accumulate(ps[t], dps[t]);
                }
              });
}

}  // namespace reifkb
