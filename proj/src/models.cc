#include "reifkb/models.h"

#include <algorithm>

#include "reifkb/errors.h"

namespace reifkb {

namespace {

std::string Name(const std::string& prefix, std::size_t i, const std::string& suffix) {
  return prefix + std::to_string(i) + suffix;
}

std::vector<std::vector<Index>> AnswerLists(ExampleBatch batch) {
  std::vector<std::vector<Index>> out;
  out.reserve(batch.size());
  for (const Example* e : batch) out.push_back(e->answers);
  return out;
}

std::vector<std::vector<Index>> TokenLists(ExampleBatch batch, std::size_t vocab) {
  std::vector<std::vector<Index>> out;
  out.reserve(batch.size());
  for (const Example* e : batch) {
    if (e->tokens.empty()) throw ArgumentError("example has no question tokens");
    for (Index t : e->tokens) {
      if (t >= vocab) {
        throw ShapeError("token id " + std::to_string(t) + " outside vocabulary of " +
                         std::to_string(vocab));
      }
    }
    out.push_back(e->tokens);
  }
  return out;
}

Var RelationHead(Tape& tape, Var q, Var w, Var b, HeadActivation activation) {
  Var logits = tape.Linear(q, w, b);
  return activation == HeadActivation::kSoftmax ? tape.Softmax(logits) : tape.Sigmoid(logits);
}

}  // namespace

Matrix MaskSeeds(const Matrix& xt, const Matrix& x0) {
  CheckSameShape(xt, x0, "MaskSeeds");
  Matrix out = xt;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double keep = 1.0 - std::clamp(x0.data()[i], 0.0, 1.0);
    out.data()[i] *= keep;
  }
  return out;
}

Var Model::Loss(Tape& tape, ExampleBatch batch) const {
  return tape.CrossEntropyUniform(Scores(tape, batch), AnswerLists(batch));
}

Matrix Model::SeedMatrix(ExampleBatch batch, std::size_t dim) const {
  Matrix x(batch.size(), dim);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i]->seeds.empty()) throw ArgumentError("example has an empty seed set");
    for (Index s : batch[i]->seeds) {
      if (s >= dim) {
        throw ShapeError("seed " + std::to_string(s) + " outside entity space of " +
                         std::to_string(dim));
      }
      x(i, s) = 1.0;
    }
  }
  return x;
}

MultiHopModel::MultiHopModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine)
    : Model(std::move(spec)), engine_(std::move(engine)) {
  if (spec_.hops < 1) throw ConfigError("multihop model needs at least one hop");
  std::mt19937_64 rng(spec_.seed);
  params_.Create("tok_emb", spec_.vocab_size, spec_.embed_dim, Init::kEmbedding, rng);
  for (std::size_t t = 0; t < spec_.hops; ++t) {
    params_.Create(Name("hop", t, ".w"), spec_.embed_dim, engine_->num_relations(), Init::kGlorot,
                   rng);
    params_.Create(Name("hop", t, ".b"), 1, engine_->num_relations(), Init::kZeros, rng);
  }
}

Var MultiHopModel::Scores(Tape& tape, ExampleBatch batch) const {
  Var q = tape.MeanPool(tape.Param("tok_emb"), TokenLists(batch, spec_.vocab_size));
  Matrix x0 = SeedMatrix(batch, engine_->input_dim());
  Var x = tape.Constant(x0);
  for (std::size_t t = 0; t < spec_.hops; ++t) {
    Var r = RelationHead(tape, q, tape.Param(Name("hop", t, ".w")),
                         tape.Param(Name("hop", t, ".b")), spec_.activation);
    x = tape.Follow(x, r, *engine_);
  }
  if (spec_.mask_seeds && spec_.hops >= 2) {
    x = tape.Hadamard(x, tape.Constant(MaskSeeds(Matrix(x0.rows(), x0.cols(), 1.0), x0)));
  }
  return x;
}

CvtModel::CvtModel(ModelSpec spec, std::shared_ptr<const KnowledgeBase> kb)
    : Model(std::move(spec)) {
  const Schema& schema = kb->schema();
  const TypeId e = schema.TypeIndex(spec_.entity_type);
  const TypeId c = schema.TypeIndex(spec_.cvt_type);
  for (const RelationDecl& d : schema.relations()) {
    const bool ok = (d.subject_type == e && d.object_type == e) ||
                    (d.subject_type == e && d.object_type == c) ||
                    (d.subject_type == c && d.object_type == e);
    if (!ok) {
      throw SchemaError("relation '" + d.name + "' has signature " +
                        schema.type(d.subject_type).name + "->" +
                        schema.type(d.object_type).name +
                        "; only entity->entity, entity->cvt and cvt->entity are allowed");
    }
  }
  auto view = [&](TypeId s, TypeId o, const char* what) {
    auto v = std::make_shared<const KnowledgeBase>(kb->SignatureView(s, o));
    if (v->num_relations() == 0) {
      throw SchemaError(std::string("CVT model needs at least one ") + what + " relation");
    }
    return FollowEngine::Create(v, spec_.strategy);
  };
  ee_ = view(e, e, "entity->entity");
  ec_ = view(e, c, "entity->cvt");
  ce_ = view(c, e, "cvt->entity");

  std::mt19937_64 rng(spec_.seed);
  params_.Create("tok_emb", spec_.vocab_size, spec_.embed_dim, Init::kEmbedding, rng);
  for (auto [name, engine] : {std::pair{"ee", ee_.get()}, {"ec", ec_.get()}, {"ce", ce_.get()}}) {
    params_.Create(std::string(name) + ".w", spec_.embed_dim, engine->num_relations(),
                   Init::kGlorot, rng);
    params_.Create(std::string(name) + ".b", 1, engine->num_relations(), Init::kZeros, rng);
  }
}

Var CvtModel::Scores(Tape& tape, ExampleBatch batch) const {
  Var q = tape.MeanPool(tape.Param("tok_emb"), TokenLists(batch, spec_.vocab_size));
  auto head = [&](const char* name) {
    return RelationHead(tape, q, tape.Param(std::string(name) + ".w"),
                        tape.Param(std::string(name) + ".b"), spec_.activation);
  };
  Var r_ee = head("ee"), r_ec = head("ec"), r_ce = head("ce");
  Var x = tape.Constant(SeedMatrix(batch, ee_->input_dim()));
  Var two_hop = tape.Follow(tape.Follow(x, r_ec, *ec_), r_ce, *ce_);
  return tape.Add(two_hop, tape.Follow(x, r_ee, *ee_));
}

Matrix CvtModel::Combine(const Matrix& x, const Matrix& r_ee, const Matrix& r_ec,
                         const Matrix& r_ce) const {
  Matrix out = ce_->Follow(ec_->Follow(x, r_ec), r_ce);
  AddInPlace(&out, ee_->Follow(x, r_ee));
  return out;
}

KbcModel::KbcModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine)
    : Model(std::move(spec)), engine_(std::move(engine)) {
  if (spec_.hops < 1 || spec_.chains < 1) throw ConfigError("kbc model needs N >= 1 and T >= 1");
  std::mt19937_64 rng(spec_.seed);
  const std::size_t nr = engine_->num_relations();
  params_.Create("query_emb", nr, spec_.embed_dim, Init::kEmbedding, rng);
  for (std::size_t i = 0; i < spec_.chains; ++i) {
    for (std::size_t t = 0; t < spec_.hops; ++t) {
      std::string base = Name("chain", i, Name(".step", t, ""));
      params_.Create(base + ".w", spec_.embed_dim, nr, Init::kGlorot, rng);
      params_.Create(base + ".b", 1, nr, Init::kZeros, rng);
    }
  }
}

std::vector<std::vector<Var>> KbcModel::BuildHeads(Tape& tape, ExampleBatch batch) const {
  const std::size_t nr = engine_->num_relations();
  std::vector<std::vector<Index>> query(batch.size());
  Matrix mask(batch.size(), nr, 1.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i]->tokens.size() != 1) throw ArgumentError("kbc example needs one query relation");
    const Index rel = batch[i]->tokens[0];
    if (rel >= nr) throw LookupError("unknown query relation index " + std::to_string(rel));
    query[i] = {rel};
    mask(i, rel) = 0.0;
  }
  Var q = tape.MeanPool(tape.Param("query_emb"), query);
  Var mask_var = tape.Constant(std::move(mask));
  std::vector<std::vector<Var>> heads(spec_.chains);
  for (std::size_t i = 0; i < spec_.chains; ++i) {
    for (std::size_t t = 0; t < spec_.hops; ++t) {
      std::string base = Name("chain", i, Name(".step", t, ""));
      Var r = RelationHead(tape, q, tape.Param(base + ".w"), tape.Param(base + ".b"),
                           spec_.activation);
      if (spec_.mask_query_relation) r = tape.Hadamard(r, mask_var);
      heads[i].push_back(r);
    }
  }
  return heads;
}

std::vector<std::vector<Matrix>> KbcModel::Heads(ExampleBatch batch) const {
  Tape tape(const_cast<ParamStore*>(&params_));
  std::vector<std::vector<Matrix>> out;
  for (const auto& chain : BuildHeads(tape, batch)) {
    out.emplace_back();
    for (Var r : chain) out.back().push_back(tape.value(r));
  }
  return out;
}

Var KbcModel::Scores(Tape& tape, ExampleBatch batch) const {
  auto heads = BuildHeads(tape, batch);
  Var x0 = tape.Constant(SeedMatrix(batch, engine_->input_dim()));
  Var total{};
  for (std::size_t i = 0; i < heads.size(); ++i) {
    Var x = x0;
    for (Var r : heads[i]) x = tape.Add(tape.Follow(x, r, *engine_), x);
    total = i == 0 ? x : tape.Add(total, x);
  }
  return total;
}

Matrix KbcChainRecursive(const Matrix& x0, std::span<const Matrix> relations,
                         const FollowEngine& engine) {
  Matrix x = x0;
  for (const Matrix& r : relations) {
    Matrix next = engine.Follow(x, r);
    AddInPlace(&next, x);
    x = std::move(next);
  }
  return x;
}

Matrix KbcChainExpanded(const Matrix& x0, std::span<const Matrix> relations,
                        const FollowEngine& engine) {
  const std::size_t steps = relations.size();
  if (steps >= 20) throw ArgumentError("KbcChainExpanded: too many steps to enumerate");
  Matrix total(x0.rows(), x0.cols());
  for (std::uint32_t subset = 0; subset < (1u << steps); ++subset) {
    Matrix term = x0;
    for (std::size_t t = 0; t < steps; ++t)
      if (subset & (1u << t)) term = engine.Follow(term, relations[t]);
    AddInPlace(&total, term);
  }
  return total;
}

ChainDecoderModel::ChainDecoderModel(ModelSpec spec, std::shared_ptr<const FollowEngine> engine)
    : Model(std::move(spec)), engine_(std::move(engine)) {
  if (spec_.hops < 1) throw ConfigError("chain decoder needs at least one step");
  std::mt19937_64 rng(spec_.seed);
  const std::size_t e = spec_.embed_dim, h = spec_.hidden_dim, nr = engine_->num_relations();
  params_.Create("tok_emb", spec_.vocab_size, e, Init::kEmbedding, rng);
  params_.Create("enc.w", e + h, 4 * h, Init::kGlorot, rng);
  params_.Create("enc.b", 1, 4 * h, Init::kZeros, rng);
  params_.Create("dec.w", nr + h, 4 * h, Init::kGlorot, rng);
  params_.Create("dec.b", 1, 4 * h, Init::kZeros, rng);
  params_.Create("f_r.w", h, nr, Init::kGlorot, rng);
  params_.Create("f_r.b", 1, nr, Init::kZeros, rng);
  params_.Create("f_p.w", h, 1, Init::kGlorot, rng);
  params_.Create("f_p.b", 1, 1, Init::kZeros, rng);
}

Var ChainDecoderModel::Scores(Tape& tape, ExampleBatch batch) const {
  return Run(tape, batch, nullptr);
}

ChainDecoderModel::Trace ChainDecoderModel::Decode(ExampleBatch batch) const {
  Tape tape(const_cast<ParamStore*>(&params_));
  Trace trace;
  Run(tape, batch, &trace);
  return trace;
}

Var ChainDecoderModel::Run(Tape& tape, ExampleBatch batch, Trace* trace) const {
  const std::size_t b = batch.size(), hid = spec_.hidden_dim, nr = engine_->num_relations();
  auto tokens = TokenLists(batch, spec_.vocab_size);
  std::size_t max_len = 0;
  for (const auto& t : tokens) max_len = std::max(max_len, t.size());

  Var emb = tape.Param("tok_emb");
  Var enc_w = tape.Param("enc.w"), enc_b = tape.Param("enc.b");
  Var h = tape.Constant(Matrix(b, hid));
  Var c = tape.Constant(Matrix(b, hid));
  // Sequences are left-padded so every one ends at the last step; rows keep
  // their state unchanged while padded.
  for (std::size_t s = 0; s < max_len; ++s) {
    std::vector<std::vector<Index>> ids(b);
    Matrix active(b, 1), idle(b, 1);
    bool all_active = true;
    for (std::size_t i = 0; i < b; ++i) {
      const std::size_t offset = max_len - tokens[i].size();
      const bool on = s >= offset;
      ids[i] = {on ? tokens[i][s - offset] : Index{0}};
      active(i, 0) = on ? 1.0 : 0.0;
      idle(i, 0) = on ? 0.0 : 1.0;
      all_active = all_active && on;
    }
    Var hc = tape.LstmCell(tape.MeanPool(emb, ids), h, c, enc_w, enc_b);
    Var h_new = tape.SliceCols(hc, 0, hid);
    Var c_new = tape.SliceCols(hc, hid, 2 * hid);
    if (all_active) {
      h = h_new;
      c = c_new;
    } else {
      Var on = tape.Constant(active), off = tape.Constant(idle);
      h = tape.Add(tape.ScaleRows(h_new, on), tape.ScaleRows(h, off));
      c = tape.Add(tape.ScaleRows(c_new, on), tape.ScaleRows(c, off));
    }
  }

  Var dec_w = tape.Param("dec.w"), dec_b = tape.Param("dec.b");
  Var fr_w = tape.Param("f_r.w"), fr_b = tape.Param("f_r.b");
  Var fp_w = tape.Param("f_p.w"), fp_b = tape.Param("f_p.b");
  Var x = tape.Constant(SeedMatrix(batch, engine_->input_dim()));
  Var r_prev = tape.Constant(Matrix(b, nr));
  std::vector<Var> xs, ps;
  for (std::size_t t = 0; t < spec_.hops; ++t) {
    Var p = tape.Sigmoid(tape.Linear(h, fp_w, fp_b));
    Var r = tape.Softmax(tape.Linear(h, fr_w, fr_b));
    x = tape.Follow(x, r, *engine_);
    xs.push_back(x);
    ps.push_back(p);
    if (trace != nullptr) {
      trace->stop.push_back(tape.value(p));
      trace->relations.push_back(tape.value(r));
    }
    if (t + 1 < spec_.hops) {
      Var hc = tape.LstmCell(r_prev, h, c, dec_w, dec_b);
      h = tape.SliceCols(hc, 0, hid);
      c = tape.SliceCols(hc, hid, 2 * hid);
      r_prev = r;
    }
  }
  return tape.StopMixture(xs, ps, spec_.stop_mode);
}

std::unique_ptr<Model> CreateModel(const ModelSpec& spec, std::shared_ptr<const KnowledgeBase> kb) {
  if (spec.task == "cvt") return std::make_unique<CvtModel>(spec, std::move(kb));
  if (spec.task != "multihop" && spec.task != "kbc" && spec.task != "chain") {
    throw ConfigError("unknown task '" + spec.task + "' (multihop, cvt, kbc, chain)");
  }
  auto engine = FollowEngine::Create(std::move(kb), spec.strategy);
  if (spec.task == "multihop") return std::make_unique<MultiHopModel>(spec, engine);
  if (spec.task == "kbc") return std::make_unique<KbcModel>(spec, engine);
  return std::make_unique<ChainDecoderModel>(spec, engine);
}

GradCheckReport GradCheckModel(Model& model, ExampleBatch batch, const GradCheckOptions& options) {
  auto loss = [&](bool record) {
    Tape tape(&model.params());
    Var l = model.Loss(tape, batch);
    if (record) tape.Backward(l);
    return tape.ExtendedScalar(l);
  };
  return GradCheck(&model.params(), loss, options);
}

}  // namespace reifkb
