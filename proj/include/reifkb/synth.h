#ifndef REIFKB_SYNTH_H_
#define REIFKB_SYNTH_H_

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reifkb/dataset.h"
#include "reifkb/kb.h"
#include "reifkb/models.h"

namespace reifkb {

// Grid world: cells "cell_<row>_<col>" with index row * n + col, directed
// edges to the four neighbours.
struct GridSpec {
  int n = 10;
  // When > 0, edges are assigned round-robin by edge index to m synthetic
  // relations "r<i>" instead of north/south/east/west.
  std::size_t relation_split = 0;
  // Adds vertical_move (north or south) and horizontal_move (east or west).
  bool vertical_horizontal = false;
};

// Edge index order: cells in row-major order, directions north, south,
// east, west. ArgumentError if n < 2 or m exceeds the edge count.
KnowledgeBase GenGridKb(const GridSpec& spec);
inline std::size_t GridEdgeCount(int n) { return 4 * static_cast<std::size_t>(n) * (n - 1); }

struct GridQaSpec {
  int n = 10;
  std::size_t max_hops = 5;
  bool vertical_horizontal = false;  // NSEW-VH grammar
  std::size_t train_count = 20000;
  std::size_t dev_count = 1000;
  std::size_t test_count = 2000;
  std::uint64_t seed = 0;
};

struct QaDataset {
  std::vector<std::string> vocab;  // id 0 is the padding token
  std::vector<Example> train, dev, test;
};

// Sentence "go w1 ... wk" for a relation path; words are relation names.
std::vector<std::string> GridSentence(const std::vector<std::string>& relations);

// Hop counts uniform in 1..max_hops, relations uniform over the grammar,
// seeds uniform over cells with a nonempty answer. Answers come from the
// R-neighbour oracle. Splits are assigned by a hash of (tokens, seed), so
// an identical question never lands in two splits. ConfigError if the KB
// lacks a grammar relation.
QaDataset GenGridQa(const KnowledgeBase& kb, const GridQaSpec& spec);

struct CvtSpec {
  std::size_t num_entities = 200;
  std::size_t num_events = 150;
  std::size_t ee_relations = 4;
  std::size_t ec_relations = 3;
  std::size_t ce_relations = 3;
  std::size_t ee_fanout = 2;  // edges per entity per E->E relation
  std::size_t train_count = 4000;
  std::size_t dev_count = 400;
  std::size_t test_count = 800;
  std::uint64_t seed = 0;
};

struct CvtDataset {
  KnowledgeBase kb;
  QaDataset qa;
};

// Types "entity" and "cvt"; every event has one incoming E->CVT edge and
// one edge for each CVT->E relation. Questions are "what <rel>" (one hop)
// or "what <rel_in> <rel_out>" (through a CVT); a two-hop question is kept
// only when no answer is one E->E hop from the seed.
CvtDataset GenCvt(const CvtSpec& spec);

struct KbcSplit {
  KnowledgeBase train_kb;            // original relations plus kept target facts
  std::vector<KbcQuery> train;       // kept facts grouped by head
  std::vector<KbcQuery> eval;        // held-out heads with full oracle tails
  std::size_t total_facts = 0;
  std::size_t held_out_facts = 0;
  std::vector<std::string> warnings;
};

// Target facts are the oracle composition of `path` (2-3 relation names).
// floor(holdout * facts) facts, chosen by a seeded shuffle, are removed
// from the KB's copy of `target`. DatasetError when the composition has
// fewer than 10 facts; ArgumentError for holdout outside [0, 1).
KbcSplit GenKbcSplit(const KnowledgeBase& kb, const std::vector<std::string>& path,
                     const std::string& target, double holdout, std::uint64_t seed);

struct RandomKbSpec {
  std::size_t max_entities = 200;
  std::size_t max_relations = 20;
  std::size_t max_triples = 1000;
  bool hard = false;  // all weights 1 instead of uniform(0, 1)
};

// Untyped KB "entity" with entity, relation and triple counts drawn
// uniformly up to the bounds (at least 2 entities and 1 relation).
KnowledgeBase RandomKb(std::mt19937_64& rng, const RandomKbSpec& spec);

// Oracle replay of a chain of relations from a seed set.
std::set<Index> ChainOracle(const KnowledgeBase& kb, std::set<Index> seeds,
                            const std::vector<RelationId>& path);

}  // namespace reifkb

#endif  // REIFKB_SYNTH_H_
