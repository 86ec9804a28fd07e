#include "reifkb/verify.h"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <random>
#include <set>

#include "reifkb/follow.h"
#include "reifkb/models.h"
#include "reifkb/reified.h"
#include "reifkb/synth.h"
#include "reifkb/weighted_set.h"

namespace reifkb {

namespace {

Matrix RandomInput(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double zero_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng) < zero_fraction ? 0.0 : u(rng);
  return m;
}

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

SuiteResult VerifyEquivalence(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "strategy-equivalence";
  res.limit = 1e-9;
  std::mt19937_64 rng(options.seed ^ 0x65717569ULL);
  for (std::size_t t = 0; t < options.random_kbs; ++t) {
    KnowledgeBase kb = RandomKb(rng, {});
    Matrix x = RandomInput(rng, 1, kb.num_entities(), 0.5);
    Matrix r = RandomInput(rng, 1, kb.num_relations(), 0.3);
    Matrix naive = FollowNaive(x, r, kb);
    Matrix late = FollowLate(x, r, kb);
    Matrix reified = FollowReified(x, r, Reify(kb));
    res.worst = std::max({res.worst, MaxAbsDiff(naive, late), MaxAbsDiff(naive, reified)});
    ++res.cases;
  }
  res.passed = res.worst <= res.limit;
  res.detail = "max |naive-late|, |naive-reified| = " + Format("%.3g", res.worst);
  return res;
}

SuiteResult VerifyOracle(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "oracle-support";
  std::mt19937_64 rng(options.seed ^ 0x6f7261636cULL);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < options.random_kbs; ++t) {
    KnowledgeBase kb = RandomKb(rng, {50, 8, 300, true});
    std::bernoulli_distribution coin(0.2);
    std::set<Index> xs;
    std::set<RelationId> rs;
    for (Index i = 0; i < kb.num_entities(); ++i)
      if (coin(rng)) xs.insert(i);
    for (RelationId k = 0; k < kb.num_relations(); ++k)
      if (coin(rng)) rs.insert(k);
    std::vector<Index> xv(xs.begin(), xs.end()), rv(rs.begin(), rs.end());
    Matrix x = KHot(kb.num_entities(), xv), r = KHot(kb.num_relations(), rv);
    const std::set<Index> oracle = RNeighborsOracle(kb, xs, rs);
    for (const Matrix& y : {FollowNaive(x, r, kb), FollowLate(x, r, kb), FollowReified(x, r, Reify(kb))}) {
      std::set<Index> support;
      for (std::size_t j = 0; j < y.cols(); ++j)
        if (y(0, j) > 0.0) support.insert(static_cast<Index>(j));
      if (support != oracle) ++mismatches;
    }
    ++res.cases;
  }
  res.worst = static_cast<double>(mismatches);
  res.passed = mismatches == 0;
  res.detail = std::to_string(mismatches) + " support mismatches";
  return res;
}

SuiteResult VerifyOpCounts(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "op-counts";
  std::mt19937_64 rng(options.seed ^ 0x6f70636eULL);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < options.random_kbs; ++t) {
    KnowledgeBase kb = RandomKb(rng, {});
    const std::size_t nr = kb.num_relations();
    Matrix x = RandomInput(rng, 1, kb.num_entities(), 0.0);
    Matrix r = RandomInput(rng, 1, nr, 0.0);
    OpCounts naive, late, reified;
    FollowNaive(x, r, kb, &naive);
    FollowLate(x, r, kb, &late);
    FollowReified(x, r, Reify(kb), &reified);
    const bool ok = naive.sp_dense_matmuls == 1 && naive.sparse_adds == nr &&
                    naive.dense_add_or_hadamard == 0 && late.sp_dense_matmuls == nr &&
                    late.dense_add_or_hadamard == nr && late.sparse_adds == 0 &&
                    reified.sp_dense_matmuls == 3 && reified.dense_add_or_hadamard == 1 &&
                    reified.sparse_adds == 0;
    if (!ok) ++violations;
    ++res.cases;
  }
  res.worst = static_cast<double>(violations);
  res.passed = violations == 0;
  res.detail = std::to_string(violations) + " contract violations";
  return res;
}

SuiteResult VerifyShards(const VerifyOptions& options) {
  SuiteResult res;
  res.name = "shard-equivalence";
  res.limit = 1e-9;
  std::mt19937_64 rng(options.seed ^ 0x7368617264ULL);
  std::size_t nondeterministic = 0;
  for (std::size_t t = 0; t < options.random_kbs; ++t) {
    KnowledgeBase kb = RandomKb(rng, {});
    ReifiedKB rkb = Reify(kb);
    Matrix x = RandomInput(rng, 4, kb.num_entities(), 0.3);
    Matrix r = RandomInput(rng, 4, kb.num_relations(), 0.3);
    const Matrix ref = FollowReified(x, r, rkb);
    for (std::size_t m : options.shard_counts) {
      ShardedReifiedKB skb = Shard(rkb, m);
      const Matrix seq = FollowSharded(x, r, skb, false);
      const Matrix par = FollowSharded(x, r, skb, true);
      if (!(seq == par)) ++nondeterministic;
      res.worst = std::max(res.worst, MaxAbsDiff(seq, ref));
      ++res.cases;
    }
  }
  res.passed = res.worst <= res.limit && nondeterministic == 0;
  res.detail = "max |sharded-unsharded| = " + Format("%.3g", res.worst) + ", " +
               std::to_string(nondeterministic) + " parallel/sequential differences";
  return res;
}

namespace {

// Entities {a, b, d, e}, events {c0, c1}: a likes b, b knows e, a and e each
// attach to an event, c0 winner d, c1 place a.
std::shared_ptr<const KnowledgeBase> GradCvtKb() {
  Schema schema;
  TypeId e = schema.AddType("entity", std::vector<std::string>{"a", "b", "d", "e"});
  TypeId c = schema.AddType("cvt", std::vector<std::string>{"c0", "c1"});
  schema.AddRelation("likes", e, e);
  schema.AddRelation("knows", e, e);
  schema.AddRelation("event_of", e, c);
  schema.AddRelation("winner", c, e);
  schema.AddRelation("place", c, e);
  std::vector<Triple> triples = {{0, 0, 1, 1.0}, {1, 1, 3, 1.0}, {0, 2, 0, 1.0},
                                 {3, 2, 1, 1.0}, {0, 3, 2, 1.0}, {1, 4, 0, 1.0}};
  return std::make_shared<const KnowledgeBase>(KnowledgeBase::Build(schema, triples));
}

ModelSpec GradSpec(const std::string& task, std::size_t vocab, std::size_t hops) {
  ModelSpec spec;
  spec.task = task;
  spec.vocab_size = vocab;
  spec.embed_dim = 6;
  spec.hidden_dim = 5;
  spec.hops = hops;
  spec.seed = 7;
  return spec;
}

SuiteResult GradResult(const std::string& name, Model& model, const std::vector<Example>& data,
                       const GradCheckOptions& options) {
  std::vector<const Example*> batch;
  for (const Example& e : data) batch.push_back(&e);
  const GradCheckReport rep = GradCheckModel(model, batch, options);
  SuiteResult res;
  res.name = "gradcheck " + name;
  res.cases = rep.checked;
  res.worst = rep.max_rel_error;
  res.limit = 1e-4;
  res.passed = rep.max_rel_error < res.limit;
  res.detail = "worst " + rep.worst_param + "[" + std::to_string(rep.worst_index) +
               "] analytic " + Format("%.6g", rep.worst_analytic) + " numeric " +
               Format("%.6g", rep.worst_numeric);
  return res;
}

}  // namespace

std::vector<SuiteResult> VerifyGradients(const GradCheckOptions& options) {
  auto grid = std::make_shared<const KnowledgeBase>(GenGridKb({4}));
  auto engine = FollowEngine::Create(grid, Strategy::kReified);
  std::vector<SuiteResult> out;
  {
    MultiHopModel model(GradSpec("multihop", 5, 3), engine);
    out.push_back(GradResult("multihop T=3", model,
                             {{{0, 1}, {0}, {1, 4}, 1}, {{2, 3, 4}, {6}, {5}, 1}}, options));
  }
  {
    CvtModel model(GradSpec("cvt", 4, 2), GradCvtKb());
    out.push_back(GradResult("cvt", model, {{{0, 1}, {0}, {2}, 2}, {{2, 3}, {3}, {0, 1}, 1}},
                             options));
  }
  {
    ModelSpec spec = GradSpec("kbc", 0, 3);
    spec.chains = 2;
    spec.activation = HeadActivation::kSigmoid;
    KbcModel model(spec, engine);
    // Tokens are query relations: east from cell 5, north from cell 10.
    out.push_back(GradResult("kbc N=2 T=3", model, {{{2}, {5}, {6}, 0}, {{0}, {10}, {6, 2}, 0}},
                             options));
  }
  {
    ChainDecoderModel model(GradSpec("chain", 6, 3), engine);
    out.push_back(GradResult("chain T=3", model,
                             {{{1, 2}, {5}, {6}, 1}, {{3, 4, 5}, {10}, {2, 6}, 2}}, options));
  }
  return out;
}

std::vector<SuiteResult> RunAllSuites(const VerifyOptions& options) {
  std::vector<SuiteResult> out = {VerifyOracle(options), VerifyEquivalence(options),
                                  VerifyShards(options), VerifyOpCounts(options)};
  GradCheckOptions g;
  g.seed = 5;
  for (SuiteResult& r : VerifyGradients(g)) out.push_back(std::move(r));
  return out;
}

void PrintSuiteTable(const std::vector<SuiteResult>& results, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-6s %7s %12s  %s\n", "suite", "status", "cases",
                "worst", "detail");
  out << line;
  for (const SuiteResult& r : results) {
    std::snprintf(line, sizeof line, "%-22s %-6s %7zu %12.4g  ", r.name.c_str(),
                  r.passed ? "ok" : "FAIL", r.cases, r.worst);
    out << line << r.detail << '\n';
  }
}

}  // namespace reifkb
