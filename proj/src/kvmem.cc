#include "reifkb/kvmem.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

KvMemory KvMemory::Build(const KnowledgeBase& kb, std::size_t embed_dim, std::uint64_t seed) {
  if (embed_dim == 0) throw ArgumentError("KvMemory: embed_dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  KvMemory mem;
  mem.embed_dim_ = embed_dim;
  mem.fingerprint_ = kb.fingerprint();
  mem.entity_emb_ = Matrix(kb.num_entities(), embed_dim);
  for (double& v : mem.entity_emb_.data()) v = u(rng);
  Matrix rel_emb(kb.num_relations(), embed_dim);
  for (double& v : rel_emb.data()) v = u(rng);

  // Entities of every type share one index space: offset by type.
  std::vector<std::size_t> offset(kb.schema().num_types() + 1, 0);
  for (TypeId t = 0; t < kb.schema().num_types(); ++t)
    offset[t + 1] = offset[t] + kb.schema().type(t).cardinality();

  const std::size_t d = embed_dim;
  mem.keys_ = Matrix(kb.num_triples(), 2 * d);
  mem.values_.reserve(kb.num_triples());
  for (std::size_t l = 0; l < kb.num_triples(); ++l) {
    const Triple& t = kb.triples()[l];
    const RelationDecl& decl = kb.schema().relation(t.rel);
    const std::size_t s = offset[decl.subject_type] + t.subj;
    for (std::size_t j = 0; j < d; ++j) {
      mem.keys_(l, j) = rel_emb(t.rel, j);
      mem.keys_(l, d + j) = mem.entity_emb_(s, j);
    }
    mem.values_.push_back(static_cast<Index>(offset[decl.object_type] + t.obj));
  }
  return mem;
}

KvMemory::Readout KvMemory::Forward(const KnowledgeBase& kb, const Matrix& x,
                                    const Matrix& q_embed) const {
  if (kb.fingerprint() != fingerprint_ || kb.num_triples() != values_.size()) {
    throw ConsistencyError("KvMemory was built from a different knowledge base (fingerprint " +
                           HexDigest(fingerprint_) + ", got " + HexDigest(kb.fingerprint()) + ")");
  }
  const std::size_t d = embed_dim_;
  if (x.cols() != num_entities() || q_embed.cols() != d || q_embed.rows() != x.rows()) {
    throw ShapeError("KvMemory::Forward: x " + x.ShapeString() + ", q_embed " +
                     q_embed.ShapeString());
  }
  const std::size_t b = x.rows();
  Matrix query(b, 2 * d);
  Matrix seed_emb = MatMul(x, entity_emb_);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      query(i, j) = q_embed(i, j);
      query(i, d + j) = seed_emb(i, j);
    }
  }

  Readout out;
  out.attention = MatMulTB(query, keys_);
  for (std::size_t i = 0; i < b; ++i) {
    auto row = out.attention.row(i);
    if (row.empty()) continue;
    const double mx = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }

  Matrix read(b, d);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t l = 0; l < values_.size(); ++l) {
      const double a = out.attention(i, l);
      const auto v = entity_emb_.row(values_[l]);
      for (std::size_t j = 0; j < d; ++j) read(i, j) += a * v[j];
    }
  }
  out.scores = MatMulTB(read, entity_emb_);
  return out;
}

}  // namespace reifkb
