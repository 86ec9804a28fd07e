#include "reifkb/synth.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

namespace {

// rng() % n keeps the generators identical across standard libraries; the
// modulo bias is far below anything the datasets can show.
std::size_t Uniform(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

template <typename T>
void Shuffle(std::vector<T>* v, std::mt19937_64& rng) {
  for (std::size_t i = v->size(); i > 1; --i) std::swap((*v)[i - 1], (*v)[Uniform(rng, i)]);
}

// Per-relation adjacency lists for fast oracle chains.
class Adjacency {
 public:
  explicit Adjacency(const KnowledgeBase& kb) : out_(kb.num_relations()) {
    for (const Triple& t : kb.triples()) out_[t.rel][t.subj].push_back(t.obj);
  }
  std::set<Index> Step(const std::set<Index>& from, RelationId rel) const {
    std::set<Index> to;
    for (Index s : from) {
      auto it = out_[rel].find(s);
      if (it != out_[rel].end()) to.insert(it->second.begin(), it->second.end());
    }
    return to;
  }
  std::set<Index> Chain(std::set<Index> x, const std::vector<RelationId>& path) const {
    for (RelationId r : path) {
      if (x.empty()) break;
      x = Step(x, r);
    }
    return x;
  }

 private:
  std::vector<std::map<Index, std::vector<Index>>> out_;
};

// Routes questions to train/dev/test by a hash of their content until each
// split holds its requested count.
class SplitFiller {
 public:
  SplitFiller(QaDataset* data, std::size_t train, std::size_t dev, std::size_t test)
      : data_(data), want_{train, dev, test} {
    const double total = static_cast<double>(train + dev + test);
    if (total == 0) throw ArgumentError("dataset needs at least one example");
    test_cut_ = static_cast<std::uint64_t>(std::ceil(1e6 * static_cast<double>(test) / total));
    dev_cut_ = test_cut_ + static_cast<std::uint64_t>(std::ceil(1e6 * static_cast<double>(dev) / total));
  }

  void Offer(Example e) {
    Fnv1a h;
    h.U64(e.tokens.size());
    for (Index t : e.tokens) h.U64(t);
    h.U64(e.seeds.size());
    for (Index s : e.seeds) h.U64(s);
    const std::uint64_t bucket = h.digest() % 1000000;
    std::vector<Example>* split = bucket < test_cut_  ? &data_->test
                                  : bucket < dev_cut_ ? &data_->dev
                                                      : &data_->train;
    const std::size_t want = split == &data_->test ? want_[2]
                             : split == &data_->dev ? want_[1]
                                                    : want_[0];
    if (split->size() < want) split->push_back(std::move(e));
  }

  bool Full() const {
    return data_->train.size() >= want_[0] && data_->dev.size() >= want_[1] &&
           data_->test.size() >= want_[2];
  }

  std::string Status() const {
    return "train " + std::to_string(data_->train.size()) + "/" + std::to_string(want_[0]) +
           ", dev " + std::to_string(data_->dev.size()) + "/" + std::to_string(want_[1]) +
           ", test " + std::to_string(data_->test.size()) + "/" + std::to_string(want_[2]);
  }

 private:
  QaDataset* data_;
  std::size_t want_[3];
  std::uint64_t test_cut_ = 0, dev_cut_ = 0;
};

void CheckAttempts(std::size_t attempts, std::size_t limit, const SplitFiller& filler) {
  if (attempts > limit) {
    throw DatasetError("not enough distinct questions to fill the splits (" + filler.Status() +
                       "); request fewer examples");
  }
}

}  // namespace

KnowledgeBase GenGridKb(const GridSpec& spec) {
  if (spec.n < 2) throw ArgumentError("grid side must be >= 2, got " + std::to_string(spec.n));
  const std::size_t edges = GridEdgeCount(spec.n);
  if (spec.relation_split > edges) {
    throw ArgumentError("relation split m = " + std::to_string(spec.relation_split) +
                        " exceeds the " + std::to_string(edges) + " grid edges");
  }
  if (spec.relation_split > 0 && spec.vertical_horizontal) {
    throw ArgumentError("relation split and vertical/horizontal moves are exclusive");
  }
  const int n = spec.n;
  Schema schema;
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) names.push_back("cell_" + std::to_string(r) + "_" + std::to_string(c));
  schema.AddType("cell", std::move(names));
  if (spec.relation_split > 0) {
    for (std::size_t i = 0; i < spec.relation_split; ++i) schema.AddRelation("r" + std::to_string(i), 0, 0);
  } else {
    for (const char* rel : {"north", "south", "east", "west"}) schema.AddRelation(rel, 0, 0);
    if (spec.vertical_horizontal) {
      schema.AddRelation("vertical_move", 0, 0);
      schema.AddRelation("horizontal_move", 0, 0);
    }
  }

  const int dr[] = {-1, 1, 0, 0};
  const int dc[] = {0, 0, 1, -1};
  std::vector<Triple> triples, moves;
  triples.reserve(edges);
  std::size_t edge = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k], cc = c + dc[k];
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
        const auto s = static_cast<Index>(r * n + c), o = static_cast<Index>(rr * n + cc);
        const auto rel = spec.relation_split > 0
                             ? static_cast<RelationId>(edge % spec.relation_split)
                             : static_cast<RelationId>(k);
        triples.push_back({s, rel, o, 1.0});
        if (spec.vertical_horizontal) moves.push_back({s, static_cast<RelationId>(k < 2 ? 4 : 5), o, 1.0});
        ++edge;
      }
    }
  }
  triples.insert(triples.end(), moves.begin(), moves.end());
  return KnowledgeBase::Build(std::move(schema), triples);
}

std::vector<std::string> GridSentence(const std::vector<std::string>& relations) {
  std::vector<std::string> words = {"go"};
  words.insert(words.end(), relations.begin(), relations.end());
  return words;
}

std::set<Index> ChainOracle(const KnowledgeBase& kb, std::set<Index> seeds,
                            const std::vector<RelationId>& path) {
  return Adjacency(kb).Chain(std::move(seeds), path);
}

QaDataset GenGridQa(const KnowledgeBase& kb, const GridQaSpec& spec) {
  if (spec.max_hops < 1) throw ArgumentError("max_hops must be >= 1");
  std::vector<std::string> grammar = {"north", "south", "east", "west"};
  if (spec.vertical_horizontal) {
    grammar.push_back("vertical_move");
    grammar.push_back("horizontal_move");
  }
  std::vector<RelationId> rel_ids;
  for (const std::string& g : grammar) {
    auto id = kb.schema().FindRelation(g);
    if (!id) throw ConfigError("grammar relation '" + g + "' is not in the knowledge base");
    rel_ids.push_back(*id);
  }

  QaDataset data;
  data.vocab = {"<pad>", "go"};
  data.vocab.insert(data.vocab.end(), grammar.begin(), grammar.end());
  const Adjacency adj(kb);
  const std::size_t cells = kb.num_entities();
  std::mt19937_64 rng(spec.seed);
  SplitFiller filler(&data, spec.train_count, spec.dev_count, spec.test_count);
  const std::size_t total = spec.train_count + spec.dev_count + spec.test_count;
  for (std::size_t attempts = 0; !filler.Full(); ++attempts) {
    CheckAttempts(attempts, 200 * total + 10000, filler);
    const std::size_t hops = 1 + Uniform(rng, spec.max_hops);
    std::vector<RelationId> path;
    std::vector<Index> tokens = {1};
    for (std::size_t t = 0; t < hops; ++t) {
      const std::size_t w = Uniform(rng, grammar.size());
      path.push_back(rel_ids[w]);
      tokens.push_back(static_cast<Index>(2 + w));
    }
    // Rejection keeps the seed uniform over cells with a nonempty answer.
    for (int tries = 0; tries < 64; ++tries) {
      const auto seed = static_cast<Index>(Uniform(rng, cells));
      std::set<Index> answers = adj.Chain({seed}, path);
      if (answers.empty()) continue;
      filler.Offer({tokens, {seed}, {answers.begin(), answers.end()}, static_cast<int>(hops)});
      break;
    }
  }
  return data;
}

CvtDataset GenCvt(const CvtSpec& spec) {
  if (spec.num_entities < 4 || spec.num_events < 2 || spec.ee_relations < 1 ||
      spec.ec_relations < 1 || spec.ce_relations < 1 || spec.ee_fanout < 1 ||
      spec.ee_fanout >= spec.num_entities) {
    throw ArgumentError("CVT generator needs >= 4 entities, >= 2 events, >= 1 relation of each "
                        "signature and 1 <= fanout < entities");
  }
  std::mt19937_64 rng(spec.seed);
  Schema schema;
  std::vector<std::string> ents, events;
  for (std::size_t i = 0; i < spec.num_entities; ++i) ents.push_back("e" + std::to_string(i));
  for (std::size_t i = 0; i < spec.num_events; ++i) events.push_back("event" + std::to_string(i));
  const TypeId e = schema.AddType("entity", std::move(ents));
  const TypeId c = schema.AddType("cvt", std::move(events));
  std::vector<RelationId> ee, ec, ce;
  for (std::size_t i = 0; i < spec.ee_relations; ++i)
    ee.push_back(schema.AddRelation("related_" + std::to_string(i), e, e));
  for (std::size_t i = 0; i < spec.ec_relations; ++i)
    ec.push_back(schema.AddRelation("role_in_" + std::to_string(i), e, c));
  for (std::size_t i = 0; i < spec.ce_relations; ++i)
    ce.push_back(schema.AddRelation("role_out_" + std::to_string(i), c, e));

  std::vector<Triple> triples;
  for (RelationId r : ee) {
    for (std::size_t s = 0; s < spec.num_entities; ++s) {
      std::set<Index> objs;
      while (objs.size() < spec.ee_fanout) {
        const auto o = static_cast<Index>(Uniform(rng, spec.num_entities));
        if (o != s) objs.insert(o);
      }
      for (Index o : objs) triples.push_back({static_cast<Index>(s), r, o, 1.0});
    }
  }
  // Subjects of each E->CVT relation, for sampling two-hop seeds.
  std::vector<std::vector<Index>> participants(ec.size());
  for (std::size_t v = 0; v < spec.num_events; ++v) {
    const std::size_t j = Uniform(rng, ec.size());
    const auto s = static_cast<Index>(Uniform(rng, spec.num_entities));
    triples.push_back({s, ec[j], static_cast<Index>(v), 1.0});
    participants[j].push_back(s);
    for (RelationId r : ce)
      triples.push_back({static_cast<Index>(v), r, static_cast<Index>(Uniform(rng, spec.num_entities)), 1.0});
  }

  CvtDataset out{KnowledgeBase::Build(std::move(schema), triples), {}};
  const KnowledgeBase& kb = out.kb;
  QaDataset& data = out.qa;
  data.vocab = {"<pad>", "what"};
  for (const RelationDecl& d : kb.schema().relations()) data.vocab.push_back(d.name);
  auto word = [](RelationId r) { return static_cast<Index>(2 + r); };

  const Adjacency adj(kb);
  SplitFiller filler(&data, spec.train_count, spec.dev_count, spec.test_count);
  const std::size_t total = spec.train_count + spec.dev_count + spec.test_count;
  for (std::size_t attempts = 0; !filler.Full(); ++attempts) {
    CheckAttempts(attempts, 200 * total + 10000, filler);
    if (Uniform(rng, 2) == 0) {
      const RelationId r = ee[Uniform(rng, ee.size())];
      const auto seed = static_cast<Index>(Uniform(rng, spec.num_entities));
      std::set<Index> answers = adj.Step({seed}, r);
      if (answers.empty()) continue;
      filler.Offer({{1, word(r)}, {seed}, {answers.begin(), answers.end()}, 1});
    } else {
      const std::size_t j = Uniform(rng, ec.size());
      if (participants[j].empty()) continue;
      const RelationId r_out = ce[Uniform(rng, ce.size())];
      const Index seed = participants[j][Uniform(rng, participants[j].size())];
      std::set<Index> answers = adj.Chain({seed}, {ec[j], r_out});
      if (answers.empty()) continue;
      bool shortcut = false;
      for (RelationId r : ee) {
        for (Index a : adj.Step({seed}, r)) shortcut = shortcut || answers.count(a) > 0;
      }
      if (shortcut) continue;
      filler.Offer({{1, word(ec[j]), word(r_out)}, {seed}, {answers.begin(), answers.end()}, 2});
    }
  }
  return out;
}

KbcSplit GenKbcSplit(const KnowledgeBase& kb, const std::vector<std::string>& path,
                     const std::string& target, double holdout, std::uint64_t seed) {
  const Schema& schema = kb.schema();
  if (schema.num_types() != 1) throw SchemaError("KB completion splits need a single-type KB");
  if (path.size() < 2 || path.size() > 3) {
    throw ArgumentError("target must compose 2 or 3 relations, got " + std::to_string(path.size()));
  }
  if (!(holdout >= 0.0 && holdout < 1.0)) {
    throw ArgumentError("holdout fraction must be in [0, 1), got " + std::to_string(holdout));
  }
  if (schema.FindRelation(target)) throw ArgumentError("relation '" + target + "' already exists");
  std::vector<RelationId> rels;
  for (const std::string& name : path) rels.push_back(schema.RelationIndex(name));

  const Adjacency adj(kb);
  std::vector<std::pair<Index, Index>> facts;
  std::map<Index, std::set<Index>> tails;
  for (std::size_t h = 0; h < kb.num_entities(); ++h) {
    std::set<Index> t = adj.Chain({static_cast<Index>(h)}, rels);
    for (Index o : t) facts.emplace_back(static_cast<Index>(h), o);
    if (!t.empty()) tails[static_cast<Index>(h)] = std::move(t);
  }
  if (facts.size() < 10) {
    throw DatasetError("composition yields only " + std::to_string(facts.size()) +
                       " facts; at least 10 are needed for a completion task");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(facts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Shuffle(&order, rng);
  const auto held = static_cast<std::size_t>(std::floor(holdout * static_cast<double>(facts.size())));
  std::vector<bool> is_held(facts.size(), false);
  for (std::size_t i = 0; i < held; ++i) is_held[order[i]] = true;

  Schema train_schema = schema;
  const RelationId target_id = train_schema.AddRelation(target, 0, 0);
  std::vector<Triple> triples = kb.triples();
  std::map<Index, std::vector<Index>> kept;
  std::set<Index> held_heads;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    const auto [h, o] = facts[i];
    if (is_held[i]) {
      held_heads.insert(h);
    } else {
      triples.push_back({h, target_id, o, 1.0});
      kept[h].push_back(o);
    }
  }

  KbcSplit split{KnowledgeBase::Build(std::move(train_schema), triples), {}, {}, facts.size(), held, {}};
  auto name = [&](Index i) { return schema.EntityName(0, i); };
  for (const auto& [h, os] : kept) {
    KbcQuery q{target, name(h), {}};
    for (Index o : os) q.tails.push_back(name(o));
    split.train.push_back(std::move(q));
  }
  for (Index h : held_heads) {
    KbcQuery q{target, name(h), {}};
    for (Index o : tails[h]) q.tails.push_back(name(o));
    split.eval.push_back(std::move(q));
  }
  if (held == 0) split.warnings.push_back("holdout leaves no facts out; the evaluation set is empty");
  return split;
}

KnowledgeBase RandomKb(std::mt19937_64& rng, const RandomKbSpec& spec) {
  if (spec.max_entities < 2 || spec.max_relations < 1)
    throw ArgumentError("RandomKb: need at least 2 entities and 1 relation");
  std::uniform_int_distribution<std::size_t> ne(2, spec.max_entities);
  std::uniform_int_distribution<std::size_t> nr(1, spec.max_relations);
  std::uniform_int_distribution<std::size_t> nt(0, spec.max_triples);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  const std::size_t entities = ne(rng), relations = nr(rng), triples = nt(rng);
  Schema schema;
  schema.AddType("entity", entities);
  for (std::size_t r = 0; r < relations; ++r) schema.AddRelation("r" + std::to_string(r), 0, 0);
  std::uniform_int_distribution<Index> pick_e(0, static_cast<Index>(entities - 1));
  std::uniform_int_distribution<RelationId> pick_r(0, static_cast<RelationId>(relations - 1));
  std::vector<Triple> list;
  list.reserve(triples);
  for (std::size_t i = 0; i < triples; ++i) {
    // Separate statements keep the draw order fixed.
    const Index s = pick_e(rng);
    const RelationId r = pick_r(rng);
    const Index o = pick_e(rng);
    list.push_back({s, r, o, spec.hard ? 1.0 : w(rng)});
  }
  return KnowledgeBase::Build(std::move(schema), list);
}

}  // namespace reifkb
