#ifndef REIFKB_KVMEM_H_
#define REIFKB_KVMEM_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/kb.h"

namespace reifkb {

// Untrained key-value memory baseline with one entry per triple. The key of
// triple (s, r, o) is [rel_emb[r] | ent_emb[s]] and its value is o, read
// through ent_emb. Used for timing and size comparison only.
class KvMemory {
 public:
  // Random embeddings, uniform(-0.1, 0.1), from `seed`.
  static KvMemory Build(const KnowledgeBase& kb, std::size_t embed_dim, std::uint64_t seed);

  struct Readout {
    Matrix attention;  // b x N_T, rows sum to 1
    Matrix scores;     // b x N_E
  };

  // x: b x N_E seed weights, q_embed: b x embed_dim question encodings.
  // The query is [q_embed | x ent_emb]; one softmax read over all keys, then
  // scores = read ent_emb^T. ConsistencyError if `kb` is not the KB the
  // memory was built from.
  Readout Forward(const KnowledgeBase& kb, const Matrix& x, const Matrix& q_embed) const;

  std::size_t embed_dim() const { return embed_dim_; }
  std::size_t num_entries() const { return values_.size(); }
  std::size_t num_entities() const { return entity_emb_.rows(); }
  const Matrix& keys() const { return keys_; }

  // Key storage: 2 * embed_dim doubles per triple.
  std::size_t bytes() const { return keys_.size() * sizeof(double); }
  static std::size_t BytesPerTriple(std::size_t embed_dim) {
    return 2 * embed_dim * sizeof(double);
  }

 private:
  std::size_t embed_dim_ = 0;
  std::uint64_t fingerprint_ = 0;
  Matrix entity_emb_;  // N_E x d
  Matrix keys_;        // N_T x 2d
  std::vector<Index> values_;
};

}  // namespace reifkb

#endif  // REIFKB_KVMEM_H_
