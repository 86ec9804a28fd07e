#ifndef REIFKB_REIFIED_H_
#define REIFKB_REIFIED_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/kb.h"
#include "reifkb/op_counts.h"
#include "reifkb/sparse.h"

namespace reifkb {

// Size of the canonical coordinate encoding of the three triple matrices.
struct StorageAccount {
  std::size_t triples = 0;
  std::size_t index_slots = 0;  // row + column index of every nonzero
  std::size_t value_slots = 0;
  std::size_t bytes = 0;

  double index_slots_per_triple() const;
  double value_slots_per_triple() const;
};

// A KB stored as three triple-indexed sparse matrices: row l of m_subj,
// m_obj and m_rel has a single nonzero at the subject, object and relation
// of triple l. m_subj and m_obj hold 1.0; m_rel holds the triple weight.
//
// A ReifiedKB may also be a contiguous slice [first_triple, first_triple +
// num_triples) of a larger one; all slices keep the full column dimensions.
class ReifiedKB {
 public:
  ReifiedKB() = default;

  // SchemaError unless all KB relations are type-compatible.
  static ReifiedKB FromKnowledgeBase(const KnowledgeBase& kb);
  static ReifiedKB FromArrays(std::size_t num_subject_entities, std::size_t num_object_entities,
                              std::size_t num_relations, std::vector<Index> subjects,
                              std::vector<Index> objects, std::vector<Index> relations,
                              std::vector<double> weights, std::uint64_t fingerprint,
                              std::size_t first_triple = 0);

  ReifiedKB Slice(std::size_t begin, std::size_t end) const;

  const SparseMatrix& m_subj() const { return m_subj_; }
  const SparseMatrix& m_obj() const { return m_obj_; }
  const SparseMatrix& m_rel() const { return m_rel_; }

  std::size_t num_triples() const { return subjects_.size(); }
  std::size_t num_subject_entities() const { return num_subject_entities_; }
  std::size_t num_object_entities() const { return num_object_entities_; }
  std::size_t num_relations() const { return num_relations_; }
  std::size_t first_triple() const { return first_triple_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  const std::vector<Index>& subjects() const { return subjects_; }
  const std::vector<Index>& objects() const { return objects_; }
  const std::vector<Index>& relations() const { return relations_; }
  const std::vector<double>& weights() const { return weights_; }

  // Coordinate form: three matrices x N_T nonzeros x (2 indices + 1 value),
  // i.e. six integers and three floats per triple.
  StorageAccount Storage() const;

 private:
  void BuildMatrices();

  std::size_t num_subject_entities_ = 0;
  std::size_t num_object_entities_ = 0;
  std::size_t num_relations_ = 0;
  std::size_t first_triple_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<Index> subjects_;
  std::vector<Index> objects_;
  std::vector<Index> relations_;
  std::vector<double> weights_;
  SparseMatrix m_subj_;
  SparseMatrix m_obj_;
  SparseMatrix m_rel_;
};

inline ReifiedKB Reify(const KnowledgeBase& kb) { return ReifiedKB::FromKnowledgeBase(kb); }

struct ShardRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const ShardRange&) const = default;
};

// Horizontal partition of a reified KB by triple id.
class ShardedReifiedKB {
 public:
  const std::vector<ReifiedKB>& shards() const { return shards_; }
  std::vector<ShardRange> ranges() const;
  std::size_t num_shards() const { return shards_.size(); }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t num_triples() const;

  // Concatenates shard rows back into one reified KB.
  ReifiedKB Merge() const;

 private:
  friend ShardedReifiedKB Shard(const ReifiedKB& rkb, std::size_t num_shards);
  std::vector<ReifiedKB> shards_;
  std::uint64_t fingerprint_ = 0;
};

// Contiguous near-equal ranges; the first N_T mod m shards get one extra
// triple. num_shards > N_T clamps to N_T; an empty KB yields one empty
// shard; ArgumentError when num_shards is 0.
ShardedReifiedKB Shard(const ReifiedKB& rkb, std::size_t num_shards);
std::vector<ShardRange> ShardRanges(std::size_t num_triples, std::size_t num_shards);

// (X M_subj^T (.) R M_rel^T) M_obj.
Matrix FollowReified(const Matrix& x, const Matrix& r, const ReifiedKB& rkb,
                     OpCounts* counts = nullptr);

// Per-shard reified follow, reduced by summation in ascending shard order.
// With `parallel`, shards run as concurrent OpenMP tasks; the result is
// byte-identical to sequential execution.
Matrix FollowSharded(const Matrix& x, const Matrix& r, const ShardedReifiedKB& skb,
                     bool parallel, OpCounts* counts = nullptr);

// Vector-Jacobian products of the reified follow for upstream gradient g:
//   dX = (g M_obj^T (.) R M_rel^T) M_subj
//   dR = (g M_obj^T (.) X M_subj^T) M_rel
void FollowReifiedBackward(const Matrix& x, const Matrix& r, const Matrix& g,
                           const ReifiedKB& rkb, Matrix* dx, Matrix* dr);
void FollowShardedBackward(const Matrix& x, const Matrix& r, const Matrix& g,
                           const ShardedReifiedKB& skb, bool parallel, Matrix* dx, Matrix* dr);

// Binary cache: magic "RKBC", u32 version, u64 fingerprint, u64 N_T,
// u64 subject-entity count, u64 object-entity count, u64 N_R, then the
// subject, object and relation index arrays (u32) and the weights (f64),
// all little-endian.
void SaveReifiedCache(const ReifiedKB& rkb, const std::filesystem::path& path);
// ConsistencyError if `expected_fingerprint` is given and differs.
ReifiedKB LoadReifiedCache(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_fingerprint = std::nullopt);

}  // namespace reifkb

#endif  // REIFKB_REIFIED_H_
