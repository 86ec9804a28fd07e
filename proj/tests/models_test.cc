#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "reifkb/errors.h"
#include "reifkb/kvmem.h"
#include "reifkb/models.h"
#include "reifkb/train.h"
#include "reifkb/verify.h"
#include "reifkb/weighted_set.h"
#include "test_util.h"

using namespace reifkb;
using reifkb::testing::Cell;
using reifkb::testing::SmallGrid;
using reifkb::testing::Support;

namespace {

constexpr RelationId kNorth = 0, kSouth = 1, kEast = 2, kWest = 3;

std::shared_ptr<const KnowledgeBase> Grid(int n) {
  return std::make_shared<const KnowledgeBase>(SmallGrid(n));
}

std::vector<const Example*> Ptrs(const std::vector<Example>& data) {
  std::vector<const Example*> out;
  for (const Example& e : data) out.push_back(&e);
  return out;
}

// Bias of +-1000 saturates softmax and sigmoid to exact 0/1 in double.
void ForceHead(Model& model, const std::string& prefix, std::size_t index, bool sigmoid = false) {
  Parameter& w = model.params().Get(prefix + ".w");
  Parameter& b = model.params().Get(prefix + ".b");
  w.value.Fill(0.0);
  b.value.Fill(sigmoid ? -1000.0 : 0.0);
  b.value(0, index) = 1000.0;
}

Matrix SoftmaxRows(const Matrix& z) {
  Matrix p = z;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    auto row = p.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) sum += (v = std::exp(v - mx));
    for (double& v : row) v /= sum;
  }
  return p;
}

Matrix ScoresOf(const Model& model, const std::vector<Example>& data) {
  Tape tape(const_cast<ParamStore*>(&model.params()));
  auto ptrs = Ptrs(data);
  return tape.value(model.Scores(tape, ptrs));
}

void CheckDistributions(const Matrix& scores) {
  Matrix p = SoftmaxRows(scores);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double sum = 0.0;
    for (double v : p.row(i)) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

std::size_t Argmax(std::span<const double> row) {
  return TopK(row, 1)[0];
}

// Two entities a, b; event c0 links a to d. Types: entity {a, b, d, e},
// cvt {c0, c1}.
std::shared_ptr<const KnowledgeBase> TinyCvtKb() {
  Schema schema;
  TypeId e = schema.AddType("entity", std::vector<std::string>{"a", "b", "d", "e"});
  TypeId c = schema.AddType("cvt", std::vector<std::string>{"c0", "c1"});
  schema.AddRelation("likes", e, e);
  schema.AddRelation("knows", e, e);
  schema.AddRelation("event_of", e, c);
  schema.AddRelation("winner", c, e);
  schema.AddRelation("place", c, e);
  std::vector<Triple> triples = {
      {0, 0, 1, 1.0},  // a likes b
      {1, 1, 3, 1.0},  // b knows e
      {0, 2, 0, 1.0},  // a event_of c0
      {3, 2, 1, 1.0},  // e event_of c1
      {0, 3, 2, 1.0},  // c0 winner d
      {1, 4, 0, 1.0},  // c1 place a
  };
  return std::make_shared<const KnowledgeBase>(KnowledgeBase::Build(schema, triples));
}

ModelSpec SmallSpec(const std::string& task, std::size_t vocab) {
  ModelSpec spec;
  spec.task = task;
  spec.vocab_size = vocab;
  spec.embed_dim = 6;
  spec.hidden_dim = 5;
  spec.seed = 7;
  return spec;
}

}  // namespace

TEST_CASE("mask seeds examples") {
  Matrix xt = Matrix::FromRows({{0.5, 0.5, 0.0}});
  Matrix masked = MaskSeeds(xt, Matrix::FromRows({{1.0, 0.0, 0.0}}));
  CHECK(masked == Matrix::FromRows({{0.0, 0.5, 0.0}}));
  CHECK(MaskSeeds(xt, Matrix(1, 3)) == xt);
  CHECK_THROWS_AS(MaskSeeds(xt, Matrix(1, 2)), ShapeError);
}

TEST_CASE("mask seeds zeroes seeds and never raises other scores") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix xt(2, 10), x0(2, 10);
    for (double& v : xt.data()) v = u(rng);
    for (double& v : x0.data()) v = u(rng) > 1.0 ? (u(rng) > 0 ? 1.0 : 3.0) : 0.0;
    Matrix m = MaskSeeds(xt, x0);
    for (std::size_t i = 0; i < xt.size(); ++i) {
      if (x0.data()[i] >= 1.0) CHECK(m.data()[i] == 0.0);
      if (x0.data()[i] == 0.0) CHECK(m.data()[i] == xt.data()[i]);
      CHECK(std::abs(m.data()[i]) <= std::abs(xt.data()[i]));
    }
  }
}

TEST_CASE("multihop forced heads on the 3x3 grid") {
  auto kb = Grid(3);
  auto engine = FollowEngine::Create(kb, Strategy::kReified);
  ModelSpec spec = SmallSpec("multihop", 2);

  spec.hops = 1;
  MultiHopModel one(spec, engine);
  ForceHead(one, "hop0", kNorth);
  std::vector<Example> q1 = {{{0}, {Cell(3, 1, 1)}, {Cell(3, 0, 1)}, 1}};
  Matrix s1 = ScoresOf(one, q1);
  CHECK(Argmax(s1.row(0)) == Cell(3, 0, 1));

  spec.hops = 2;
  MultiHopModel two(spec, engine);
  ForceHead(two, "hop0", kNorth);
  ForceHead(two, "hop1", kEast);
  std::vector<Example> q2 = {{{1}, {Cell(3, 2, 0)}, {Cell(3, 1, 1)}, 2}};
  Matrix s2 = ScoresOf(two, q2);
  CHECK(Argmax(s2.row(0)) == Cell(3, 1, 1));
  CheckDistributions(s2);
}

TEST_CASE("multihop with forced heads reproduces FollowChain") {
  auto kb = Grid(4);
  auto engine = FollowEngine::Create(kb, Strategy::kLateMixing);
  ModelSpec spec = SmallSpec("multihop", 3);
  spec.hops = 3;
  MultiHopModel model(spec, engine);
  const RelationId path[] = {kSouth, kEast, kWest};
  std::vector<Matrix> rels;
  for (std::size_t t = 0; t < 3; ++t) {
    ForceHead(model, "hop" + std::to_string(t), path[t]);
    rels.push_back(OneHot(4, path[t]));
  }
  std::vector<Example> q = {{{0, 2}, {Cell(4, 0, 1), Cell(4, 1, 2)}, {0}, 3}};
  Matrix expected = FollowChain(KHot(16, std::vector<Index>{Cell(4, 0, 1), Cell(4, 1, 2)}),
                                rels, *engine);
  CHECK(ScoresOf(model, q) == expected);
}

TEST_CASE("multihop seed mask applies only from two hops") {
  auto engine = FollowEngine::Create(Grid(3), Strategy::kReified);
  ModelSpec spec = SmallSpec("multihop", 1);
  spec.mask_seeds = true;
  spec.hops = 2;
  MultiHopModel model(spec, engine);
  ForceHead(model, "hop0", kNorth);
  ForceHead(model, "hop1", kSouth);
  std::vector<Example> q = {{{0}, {Cell(3, 1, 1)}, {Cell(3, 1, 1)}, 2}};
  Matrix s = ScoresOf(model, q);
  CHECK(s(0, Cell(3, 1, 1)) == 0.0);
  double sum = 0.0;
  for (double v : s.row(0)) sum += v;
  CHECK(sum == 0.0);

  spec.hops = 1;
  MultiHopModel single(spec, engine);
  ForceHead(single, "hop0", kNorth);
  Matrix s1 = ScoresOf(single, q);
  CHECK(s1(0, Cell(3, 0, 1)) == 1.0);
}

TEST_CASE("empty seeds and bad tokens are rejected") {
  auto engine = FollowEngine::Create(Grid(3), Strategy::kReified);
  MultiHopModel model(SmallSpec("multihop", 2), engine);
  std::vector<Example> no_seed = {{{0}, {}, {1}, 1}};
  CHECK_THROWS_AS(ScoresOf(model, no_seed), ArgumentError);
  std::vector<Example> bad_token = {{{5}, {0}, {1}, 1}};
  CHECK_THROWS_AS(ScoresOf(model, bad_token), ShapeError);
}

TEST_CASE("cvt unique path and branch ablation") {
  auto kb = TinyCvtKb();
  CvtModel model(SmallSpec("cvt", 3), kb);
  CHECK(model.ee().num_relations() == 2);
  CHECK(model.ec().num_relations() == 1);
  CHECK(model.ce().num_relations() == 2);
  CHECK(model.output_dim() == 4);

  Matrix x = OneHot(4, 0);  // a
  Matrix out = model.Combine(x, Matrix(1, 2), OneHot(1, 0), OneHot(2, 0));
  CHECK(Argmax(out.row(0)) == 2);  // a -event_of-> c0 -winner-> d
  CHECK(Support(out) == std::set<Index>{2});

  Matrix r_ee = Matrix::FromRows({{0.7, 0.3}});
  Matrix ablated = model.Combine(x, r_ee, Matrix(1, 1), Matrix::FromRows({{0.4, 0.6}}));
  CHECK(ablated == model.ee().Follow(x, r_ee));
}

TEST_CASE("cvt scores combine both branches and never score cvt nodes") {
  auto kb = TinyCvtKb();
  CvtModel model(SmallSpec("cvt", 3), kb);
  std::vector<Example> q = {{{0, 1}, {0}, {2}, 2}, {{2}, {3}, {0}, 2}};
  Matrix s = ScoresOf(model, q);
  CHECK(s.cols() == 4);
  CheckDistributions(s);
  CHECK(AllFinite(s));
}

TEST_CASE("cvt rejects illegal signatures") {
  Schema schema;
  TypeId e = schema.AddType("entity", 3);
  TypeId c = schema.AddType("cvt", 2);
  schema.AddRelation("event_of", e, c);
  schema.AddRelation("winner", c, e);
  schema.AddRelation("likes", e, e);
  schema.AddRelation("chain", c, c);
  auto kb = std::make_shared<const KnowledgeBase>(KnowledgeBase::Build(schema, {}));
  CHECK_THROWS_AS(CvtModel(SmallSpec("cvt", 2), kb), SchemaError);
}

TEST_CASE("kbc residual keeps the head entity") {
  auto engine = FollowEngine::Create(Grid(3), Strategy::kReified);
  ModelSpec spec = SmallSpec("kbc", 0);
  spec.chains = 1;
  spec.hops = 1;
  spec.activation = HeadActivation::kSigmoid;
  KbcModel model(spec, engine);
  ForceHead(model, "chain0.step0", kNorth, true);
  std::vector<Example> q = {{{kSouth}, {Cell(3, 1, 1)}, {Cell(3, 0, 1)}, 0}};
  Matrix s = ScoresOf(model, q);
  CHECK(Support(s) == std::set<Index>{Cell(3, 0, 1), Cell(3, 1, 1)});
  CHECK(s(0, Cell(3, 0, 1)) == 1.0);
  CHECK(s(0, Cell(3, 1, 1)) == 1.0);
}

TEST_CASE("kbc masks the query relation") {
  auto engine = FollowEngine::Create(Grid(3), Strategy::kReified);
  ModelSpec spec = SmallSpec("kbc", 0);
  spec.chains = 1;
  spec.hops = 1;
  spec.activation = HeadActivation::kSigmoid;
  KbcModel model(spec, engine);
  ForceHead(model, "chain0.step0", kNorth, true);
  std::vector<Example> q = {{{kNorth}, {Cell(3, 1, 1)}, {Cell(3, 0, 1)}, 0}};
  auto ptrs = Ptrs(q);
  auto heads = model.Heads(ptrs);
  CHECK(heads[0][0](0, kNorth) == 0.0);
  CHECK(Support(ScoresOf(model, q)) == std::set<Index>{Cell(3, 1, 1)});

  std::vector<Example> unknown = {{{9}, {0}, {1}, 0}};
  CHECK_THROWS_AS(ScoresOf(model, unknown), LookupError);
}

TEST_CASE("kbc recursion equals the explicit expansion for T <= 3") {
  std::mt19937_64 rng(11);
  auto kb = std::make_shared<const KnowledgeBase>(reifkb::testing::RandomKb(rng, {40, 5, 150}));
  auto engine = FollowEngine::Create(kb, Strategy::kReified);
  for (std::size_t steps = 1; steps <= 3; ++steps) {
    std::vector<Matrix> rels;
    for (std::size_t t = 0; t < steps; ++t)
      rels.push_back(reifkb::testing::RandomNonNegative(rng, 3, kb->num_relations(), 0.3));
    Matrix x0 = reifkb::testing::RandomNonNegative(rng, 3, kb->num_entities(), 0.7);
    Matrix rec = KbcChainRecursive(x0, rels, *engine);
    Matrix exp = KbcChainExpanded(x0, rels, *engine);
    CHECK(MaxAbsDiff(rec, exp) <= 1e-10);
  }
  // T = 2 term by term.
  Matrix x = OneHot(kb->num_entities(), 0);
  Matrix r1 = reifkb::testing::RandomNonNegative(rng, 1, kb->num_relations(), 0.0);
  Matrix r2 = reifkb::testing::RandomNonNegative(rng, 1, kb->num_relations(), 0.0);
  Matrix terms = engine->Follow(engine->Follow(x, r1), r2);
  AddInPlace(&terms, engine->Follow(x, r2));
  AddInPlace(&terms, engine->Follow(x, r1));
  AddInPlace(&terms, x);
  std::vector<Matrix> both = {r1, r2};
  CHECK(MaxAbsDiff(KbcChainRecursive(x, both, *engine), terms) <= 1e-10);
}

TEST_CASE("kbc model scores equal the sum of expanded chains") {
  auto kb = Grid(4);
  auto engine = FollowEngine::Create(kb, Strategy::kReified);
  ModelSpec spec = SmallSpec("kbc", 0);
  spec.chains = 2;
  spec.hops = 3;
  spec.activation = HeadActivation::kSigmoid;
  KbcModel model(spec, engine);
  std::vector<Example> q = {{{kEast}, {Cell(4, 2, 2)}, {0}, 0}, {{kWest}, {Cell(4, 0, 3)}, {1}, 0}};
  auto ptrs = Ptrs(q);
  Matrix x0(2, 16);
  x0(0, Cell(4, 2, 2)) = 1.0;
  x0(1, Cell(4, 0, 3)) = 1.0;
  Matrix expected(2, 16);
  for (const auto& chain : model.Heads(ptrs)) AddInPlace(&expected, KbcChainExpanded(x0, chain, *engine));
  CHECK(MaxAbsDiff(ScoresOf(model, q), expected) <= 1e-10);
}

TEST_CASE("chain decoder with forced stop reduces to one follow") {
  auto engine = FollowEngine::Create(Grid(3), Strategy::kReified);
  ModelSpec spec = SmallSpec("chain", 4);
  spec.hops = 1;
  ChainDecoderModel model(spec, engine);
  ForceHead(model, "f_r", kEast);
  model.params().Get("f_p.w").value.Fill(0.0);
  model.params().Get("f_p.b").value(0, 0) = 1000.0;
  std::vector<Example> q = {{{1, 2, 3}, {Cell(3, 2, 0)}, {Cell(3, 2, 1)}, 1}};
  CHECK(ScoresOf(model, q) == engine->Follow(OneHot(9, Cell(3, 2, 0)), OneHot(4, kEast)));
  auto ptrs = Ptrs(q);
  auto trace = model.Decode(ptrs);
  REQUIRE(trace.stop.size() == 1);
  CHECK(trace.stop[0](0, 0) == 1.0);
}

TEST_CASE("chain decoder stop probabilities and mixture weights") {
  auto engine = FollowEngine::Create(Grid(4), Strategy::kReified);
  ModelSpec spec = SmallSpec("chain", 6);
  spec.hops = 4;
  ChainDecoderModel model(spec, engine);
  std::vector<Example> q = {{{1, 2}, {0}, {1}, 1}, {{3, 4, 5, 1, 2}, {5}, {6}, 1}};
  auto ptrs = Ptrs(q);
  auto trace = model.Decode(ptrs);
  REQUIRE(trace.stop.size() == 4);
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<double> p(4);
    for (std::size_t t = 0; t < 4; ++t) {
      p[t] = trace.stop[t](i, 0);
      CHECK(p[t] > 0.0);
      CHECK(p[t] < 1.0);
      double rsum = 0.0;
      for (double v : trace.relations[t].row(i)) rsum += v;
      CHECK(std::abs(rsum - 1.0) <= 1e-12);
    }
    std::vector<double> raw = StopWeights(p, StopMode::kRaw);
    double survive = 1.0, total = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(raw[t] >= 0.0);
      total += raw[t];
      survive *= 1.0 - p[t];
    }
    CHECK(std::abs(total - (1.0 - survive)) <= 1e-12);
    CHECK(total <= 1.0);
  }
  CheckDistributions(ScoresOf(model, q));
}

TEST_CASE("chain decoder batches of mixed length match single examples") {
  auto engine = FollowEngine::Create(Grid(4), Strategy::kReified);
  ModelSpec spec = SmallSpec("chain", 7);
  spec.hops = 3;
  ChainDecoderModel model(spec, engine);
  std::vector<Example> batch = {
      {{1}, {0}, {1}, 1}, {{2, 3, 4, 5, 6}, {5}, {6}, 1}, {{6, 5, 4}, {9}, {8}, 1}};
  Matrix together = ScoresOf(model, batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Matrix alone = ScoresOf(model, {batch[i]});
    for (std::size_t j = 0; j < alone.cols(); ++j) CHECK(alone(0, j) == together(i, j));
  }
}

TEST_CASE("model gradient checks") {
  GradCheckOptions options;
  options.seed = 5;
  for (const SuiteResult& r : VerifyGradients(options)) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.worst < 1e-4);
  }
}

// Central differences at eps 1e-6 sit near the double rounding floor for the
// chain decoder's smallest gradients (about 1e-8). A wider step separates a
// wrong vjp from rounding noise.
TEST_CASE("chain decoder gradients agree with wide-step differences") {
  auto engine = FollowEngine::Create(Grid(4), Strategy::kReified);
  ModelSpec spec = SmallSpec("chain", 6);
  spec.hops = 3;
  ChainDecoderModel model(spec, engine);
  std::vector<Example> b = {{{1, 2}, {5}, {6}, 1}, {{3, 4, 5}, {10}, {2, 6}, 2}};
  auto ptrs = Ptrs(b);
  GradCheckOptions options;
  options.seed = 5;
  options.eps = 1e-4;
  options.samples = 400;
  auto rep = GradCheckModel(model, ptrs, options);
  INFO(rep.worst_param, " ", rep.worst_analytic, " ", rep.worst_numeric);
  CHECK(rep.max_rel_error < 1e-4);
}

namespace {

class FixedScoreModel : public Model {
 public:
  explicit FixedScoreModel(Matrix scores) : Model(ModelSpec{}), scores_(std::move(scores)) {}
  std::size_t output_dim() const override { return scores_.cols(); }
  Var Scores(Tape& tape, ExampleBatch batch) const override {
    Matrix out(batch.size(), scores_.cols());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto src = scores_.row(static_cast<std::size_t>(batch[i]->tokens[0]));
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return tape.Constant(std::move(out));
  }

 private:
  Matrix scores_;
};

}  // namespace

TEST_CASE("evaluate tie-break and perfect predictions") {
  FixedScoreModel uniform(Matrix(1, 100, 0.25));
  std::vector<Example> at_zero = {{{0}, {1}, {0}, 1}};
  std::vector<Example> at_five = {{{0}, {1}, {5}, 1}};
  CHECK(Evaluate(uniform, at_zero, 1).hits_at_1 == 1.0);
  CHECK(Evaluate(uniform, at_five, 1).hits_at_1 == 0.0);
  CHECK(Evaluate(uniform, at_five, 10).hits_at_k == 1.0);
  CHECK(std::abs(Evaluate(uniform, at_five, 1).mean_loss - std::log(100.0)) <= 1e-12);

  Matrix onehot(3, 5, -50.0);
  onehot(0, 1) = onehot(1, 4) = onehot(2, 0) = 50.0;
  FixedScoreModel perfect(onehot);
  std::vector<Example> data = {{{0}, {0}, {1}, 1}, {{1}, {0}, {4}, 1}, {{2}, {0}, {0, 3}, 1}};
  Metrics m = Evaluate(perfect, data, 2);
  CHECK(m.hits_at_1 == 1.0);
  CHECK(m.count == 3);

  std::vector<Example> empty;
  CHECK_THROWS_AS(Evaluate(perfect, empty, 1), DatasetError);
}

TEST_CASE("hits at k matches a full sort oracle") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> level(0, 6);
  const std::size_t rows = 60, cols = 30;
  Matrix scores(rows, cols);
  for (double& v : scores.data()) v = level(rng) * 0.5;  // many ties
  std::vector<Example> data;
  std::uniform_int_distribution<Index> ent(0, cols - 1);
  for (std::size_t i = 0; i < rows; ++i)
    data.push_back({{static_cast<Index>(i)}, {0}, {ent(rng), ent(rng)}, 1});
  FixedScoreModel model(scores);
  for (std::size_t k : {1, 3, 10, 30}) {
    double hits = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<Index> order(cols);
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return scores(i, a) > scores(i, b); });
      bool hit = false;
      for (std::size_t j = 0; j < k; ++j)
        for (Index a : data[i].answers) hit = hit || order[j] == a;
      hits += hit ? 1.0 : 0.0;
    }
    Metrics m = Evaluate(model, data, k, 7);
    CHECK(m.hits_at_k == hits / rows);
  }
}

TEST_CASE("kv memory shape, attention and consistency") {
  KnowledgeBase kb = SmallGrid(3);
  KvMemory mem = KvMemory::Build(kb, 64, 1);
  CHECK(mem.num_entries() == 24);
  CHECK(mem.keys().rows() == 24);
  CHECK(mem.keys().cols() == 128);
  CHECK(KvMemory::BytesPerTriple(64) == 1024);
  CHECK(mem.bytes() == 24 * 1024);

  std::mt19937_64 rng(2);
  Matrix x = reifkb::testing::RandomNonNegative(rng, 4, 9, 0.5);
  Matrix q = reifkb::testing::RandomSigned(rng, 4, 64);
  auto out = mem.Forward(kb, x, q);
  CHECK(out.scores.rows() == 4);
  CHECK(out.scores.cols() == 9);
  for (std::size_t i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (double v : out.attention.row(i)) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  KnowledgeBase other = SmallGrid(4);
  CHECK_THROWS_AS(mem.Forward(other, x, q), ConsistencyError);
  CHECK(KvMemory::Build(kb, 64, 1).keys() == mem.keys());
}

TEST_CASE("multihop T=1 learns the 3x3 grid") {
  auto kb = Grid(3);
  auto engine = FollowEngine::Create(kb, Strategy::kReified);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<Index> cell(0, 8), rel(0, 3);
  std::vector<Example> data;
  while (data.size() < 600) {
    Index s = cell(rng);
    RelationId r = rel(rng);
    auto ans = RNeighborsOracle(*kb, {s}, {r});
    if (ans.empty()) continue;
    data.push_back({{r}, {s}, {ans.begin(), ans.end()}, 1});
  }
  std::vector<Example> train(data.begin(), data.begin() + 500), dev(data.begin() + 500, data.end());
  ModelSpec spec;
  spec.task = "multihop";
  spec.vocab_size = 4;
  spec.hops = 1;
  spec.seed = 1;
  MultiHopModel model(spec, engine);
  TrainConfig config;
  config.epochs = 20;
  config.optimizer.lr = 0.01;
  config.target_hits = 1.0;
  config.seed = 3;
  TrainResult result = Train(model, train, dev, config);
  CHECK(result.best_dev.hits_at_1 == 1.0);
  CHECK(result.history.size() <= 20);
  CHECK(Evaluate(model, dev, 1).hits_at_1 == 1.0);
}
