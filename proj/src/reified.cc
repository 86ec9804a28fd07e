#include "reifkb/reified.h"

#include <fstream>
#include <string>

#include "binio.h"
#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

namespace {

constexpr char kCacheMagic[4] = {'R', 'K', 'B', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

SparseMatrix OneNonzeroPerRow(std::size_t cols, const std::vector<Index>& columns,
                              const std::vector<double>* values) {
  std::vector<CooEntry> entries;
  entries.reserve(columns.size());
  for (std::size_t l = 0; l < columns.size(); ++l) {
    entries.push_back({static_cast<Index>(l), columns[l], values ? (*values)[l] : 1.0});
  }
  return SparseMatrix(CooMatrix::FromEntries(columns.size(), cols, std::move(entries)));
}

void CheckFollowShapes(const Matrix& x, const Matrix& r, std::size_t subject_dim,
                       std::size_t relation_dim, const char* what) {
  if (x.rows() != r.rows()) {
    throw ShapeError(std::string(what) + ": batch size mismatch, X is " + x.ShapeString() +
                     " and R is " + r.ShapeString());
  }
  if (x.cols() != subject_dim) {
    throw ShapeError(std::string(what) + ": X has " + std::to_string(x.cols()) +
                     " columns, expected " + std::to_string(subject_dim));
  }
  if (r.cols() != relation_dim) {
    throw ShapeError(std::string(what) + ": R has " + std::to_string(r.cols()) +
                     " columns, expected " + std::to_string(relation_dim));
  }
}

}  // namespace

double StorageAccount::index_slots_per_triple() const {
  return triples == 0 ? 0.0 : static_cast<double>(index_slots) / static_cast<double>(triples);
}

double StorageAccount::value_slots_per_triple() const {
  return triples == 0 ? 0.0 : static_cast<double>(value_slots) / static_cast<double>(triples);
}

ReifiedKB ReifiedKB::FromKnowledgeBase(const KnowledgeBase& kb) {
  const std::size_t n = kb.num_triples();
  std::vector<Index> subjects, objects, relations;
  std::vector<double> weights;
  subjects.reserve(n);
  objects.reserve(n);
  relations.reserve(n);
  weights.reserve(n);
  for (const Triple& t : kb.triples()) {
    subjects.push_back(t.subj);
    objects.push_back(t.obj);
    relations.push_back(t.rel);
    weights.push_back(t.weight);
  }
  return FromArrays(kb.FollowInputDim(), kb.FollowOutputDim(), kb.num_relations(),
                    std::move(subjects), std::move(objects), std::move(relations),
                    std::move(weights), kb.fingerprint());
}

ReifiedKB ReifiedKB::FromArrays(std::size_t num_subject_entities, std::size_t num_object_entities,
                                std::size_t num_relations, std::vector<Index> subjects,
                                std::vector<Index> objects, std::vector<Index> relations,
                                std::vector<double> weights, std::uint64_t fingerprint,
                                std::size_t first_triple) {
  const std::size_t n = subjects.size();
  if (objects.size() != n || relations.size() != n || weights.size() != n) {
    throw ShapeError("reified KB arrays have different lengths");
  }
  ReifiedKB rkb;
  rkb.num_subject_entities_ = num_subject_entities;
  rkb.num_object_entities_ = num_object_entities;
  rkb.num_relations_ = num_relations;
  rkb.first_triple_ = first_triple;
  rkb.fingerprint_ = fingerprint;
  rkb.subjects_ = std::move(subjects);
  rkb.objects_ = std::move(objects);
  rkb.relations_ = std::move(relations);
  rkb.weights_ = std::move(weights);
  rkb.BuildMatrices();
  return rkb;
}

void ReifiedKB::BuildMatrices() {
  m_subj_ = OneNonzeroPerRow(num_subject_entities_, subjects_, nullptr);
  m_obj_ = OneNonzeroPerRow(num_object_entities_, objects_, nullptr);
  m_rel_ = OneNonzeroPerRow(num_relations_, relations_, &weights_);
}

ReifiedKB ReifiedKB::Slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > num_triples()) {
    throw ArgumentError("slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                        ") outside " + std::to_string(num_triples()) + " triples");
  }
  auto cut = [&](const auto& v) { return std::vector(v.begin() + begin, v.begin() + end); };
  return FromArrays(num_subject_entities_, num_object_entities_, num_relations_, cut(subjects_),
                    cut(objects_), cut(relations_), cut(weights_), fingerprint_,
                    first_triple_ + begin);
}

StorageAccount ReifiedKB::Storage() const {
  StorageAccount s;
  s.triples = num_triples();
  s.index_slots = 3 * 2 * s.triples;
  s.value_slots = 3 * s.triples;
  s.bytes = s.index_slots * sizeof(Index) + s.value_slots * sizeof(double);
  return s;
}

std::vector<ShardRange> ShardedReifiedKB::ranges() const {
  std::vector<ShardRange> out;
  for (const ReifiedKB& s : shards_) {
    out.push_back({s.first_triple(), s.first_triple() + s.num_triples()});
  }
  return out;
}

std::size_t ShardedReifiedKB::num_triples() const {
  std::size_t n = 0;
  for (const ReifiedKB& s : shards_) n += s.num_triples();
  return n;
}

ReifiedKB ShardedReifiedKB::Merge() const {
  std::vector<Index> subjects, objects, relations;
  std::vector<double> weights;
  for (const ReifiedKB& s : shards_) {
    subjects.insert(subjects.end(), s.subjects().begin(), s.subjects().end());
    objects.insert(objects.end(), s.objects().begin(), s.objects().end());
    relations.insert(relations.end(), s.relations().begin(), s.relations().end());
    weights.insert(weights.end(), s.weights().begin(), s.weights().end());
  }
  const ReifiedKB& first = shards_.front();
  return ReifiedKB::FromArrays(first.num_subject_entities(), first.num_object_entities(),
                               first.num_relations(), std::move(subjects), std::move(objects),
                               std::move(relations), std::move(weights), fingerprint_);
}

std::vector<ShardRange> ShardRanges(std::size_t num_triples, std::size_t num_shards) {
  if (num_shards < 1) throw ArgumentError("shard count must be at least 1");
  if (num_triples == 0) return {ShardRange{0, 0}};
  std::size_t m = std::min(num_shards, num_triples);
  std::size_t base = num_triples / m;
  std::size_t extra = num_triples % m;
  std::vector<ShardRange> out;
  std::size_t begin = 0;
  for (std::size_t s = 0; s < m; ++s) {
    std::size_t len = base + (s < extra ? 1 : 0);
    out.push_back({begin, begin + len});
    begin += len;
  }
  return out;
}

ShardedReifiedKB Shard(const ReifiedKB& rkb, std::size_t num_shards) {
  ShardedReifiedKB out;
  out.fingerprint_ = rkb.fingerprint();
  for (const ShardRange& range : ShardRanges(rkb.num_triples(), num_shards)) {
    out.shards_.push_back(rkb.Slice(range.begin, range.end));
  }
  return out;
}

Matrix FollowReified(const Matrix& x, const Matrix& r, const ReifiedKB& rkb, OpCounts* counts) {
  CheckFollowShapes(x, r, rkb.num_subject_entities(), rkb.num_relations(), "FollowReified");
  Matrix by_subject = SpMM(x, rkb.m_subj(), /*transpose=*/true);
  Matrix by_relation = SpMM(r, rkb.m_rel(), /*transpose=*/true);
  Matrix selected = Hadamard(by_subject, by_relation);
  Matrix out = SpMM(selected, rkb.m_obj());
  if (counts != nullptr) {
    counts->sp_dense_matmuls += 3;
    counts->dense_add_or_hadamard += 1;
    const std::size_t b = x.rows();
    counts->NotePeak(x.size() + r.size() + 3 * b * rkb.num_triples() + out.size());
  }
  return out;
}

Matrix FollowSharded(const Matrix& x, const Matrix& r, const ShardedReifiedKB& skb,
                     bool parallel, OpCounts* counts) {
  const auto& shards = skb.shards();
  const ReifiedKB& first = shards.front();
  CheckFollowShapes(x, r, first.num_subject_entities(), first.num_relations(), "FollowSharded");
  std::vector<Matrix> partial(shards.size());
  std::vector<OpCounts> shard_counts(shards.size());
  const long long n = static_cast<long long>(shards.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n > 1)
  for (long long s = 0; s < n; ++s) {
    partial[s] = FollowReified(x, r, shards[s], &shard_counts[s]);
  }
  Matrix out = std::move(partial[0]);
  for (std::size_t s = 1; s < partial.size(); ++s) AddInPlace(&out, partial[s]);
  if (counts != nullptr) {
    OpCounts total;
    std::size_t live = 0;
    for (const OpCounts& c : shard_counts) {
      total.sp_dense_matmuls += c.sp_dense_matmuls;
      total.dense_add_or_hadamard += c.dense_add_or_hadamard;
      live += c.peak_dense_floats;
    }
    total.dense_add_or_hadamard += shards.size() - 1;
    total.peak_dense_floats = live;
    *counts += total;
  }
  return out;
}

void FollowReifiedBackward(const Matrix& x, const Matrix& r, const Matrix& g,
                           const ReifiedKB& rkb, Matrix* dx, Matrix* dr) {
  CheckFollowShapes(x, r, rkb.num_subject_entities(), rkb.num_relations(),
                    "FollowReifiedBackward");
  if (g.rows() != x.rows() || g.cols() != rkb.num_object_entities()) {
    throw ShapeError("FollowReifiedBackward: upstream gradient " + g.ShapeString());
  }
  Matrix g_triples = SpMM(g, rkb.m_obj(), /*transpose=*/true);
  if (dx != nullptr) {
    Matrix by_relation = SpMM(r, rkb.m_rel(), /*transpose=*/true);
    *dx = SpMM(Hadamard(g_triples, by_relation), rkb.m_subj());
  }
  if (dr != nullptr) {
    Matrix by_subject = SpMM(x, rkb.m_subj(), /*transpose=*/true);
    *dr = SpMM(Hadamard(g_triples, by_subject), rkb.m_rel());
  }
}

void FollowShardedBackward(const Matrix& x, const Matrix& r, const Matrix& g,
                           const ShardedReifiedKB& skb, bool parallel, Matrix* dx, Matrix* dr) {
  const auto& shards = skb.shards();
  CheckFollowShapes(x, r, shards.front().num_subject_entities(), shards.front().num_relations(),
                    "FollowShardedBackward");
  std::vector<Matrix> pdx(shards.size()), pdr(shards.size());
  const long long n = static_cast<long long>(shards.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel && n > 1)
  for (long long s = 0; s < n; ++s) {
    FollowReifiedBackward(x, r, g, shards[s], dx ? &pdx[s] : nullptr, dr ? &pdr[s] : nullptr);
  }
  for (std::size_t s = 0; s < shards.size(); ++s) {
    if (dx != nullptr) {
      if (s == 0) *dx = std::move(pdx[0]); else AddInPlace(dx, pdx[s]);
    }
    if (dr != nullptr) {
      if (s == 0) *dr = std::move(pdr[0]); else AddInPlace(dr, pdr[s]);
    }
  }
}

void SaveReifiedCache(const ReifiedKB& rkb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write reified cache " + path.string());
  out.write(kCacheMagic, 4);
  binio::PutU32(out, kCacheVersion);
  binio::PutU64(out, rkb.fingerprint());
  binio::PutU64(out, rkb.num_triples());
  binio::PutU64(out, rkb.num_subject_entities());
  binio::PutU64(out, rkb.num_object_entities());
  binio::PutU64(out, rkb.num_relations());
  for (Index v : rkb.subjects()) binio::PutU32(out, v);
  for (Index v : rkb.objects()) binio::PutU32(out, v);
  for (Index v : rkb.relations()) binio::PutU32(out, v);
  for (double w : rkb.weights()) binio::PutF64(out, w);
  if (!out) throw ConfigError("failed writing reified cache " + path.string());
}

ReifiedKB LoadReifiedCache(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open reified cache " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string(magic, 4) != std::string(kCacheMagic, 4)) {
    throw ConfigError(path.string() + " is not a reified KB cache");
  }
  std::uint32_t version = binio::GetU32(in, "version");
  if (version != kCacheVersion) {
    throw ConfigError("unsupported reified cache version " + std::to_string(version));
  }
  std::uint64_t fingerprint = binio::GetU64(in, "fingerprint");
  if (expected_fingerprint && *expected_fingerprint != fingerprint) {
    throw ConsistencyError("reified cache fingerprint " + HexDigest(fingerprint) +
                           " does not match knowledge base " + HexDigest(*expected_fingerprint));
  }
  std::uint64_t n = binio::GetU64(in, "triple count");
  std::uint64_t ns = binio::GetU64(in, "subject entity count");
  std::uint64_t no = binio::GetU64(in, "object entity count");
  std::uint64_t nr = binio::GetU64(in, "relation count");
  std::vector<Index> subjects(n), objects(n), relations(n);
  std::vector<double> weights(n);
  for (auto& v : subjects) v = binio::GetU32(in, "subjects");
  for (auto& v : objects) v = binio::GetU32(in, "objects");
  for (auto& v : relations) v = binio::GetU32(in, "relations");
  for (auto& w : weights) w = binio::GetF64(in, "weights");
  return ReifiedKB::FromArrays(ns, no, nr, std::move(subjects), std::move(objects),
                               std::move(relations), std::move(weights), fingerprint);
}

}  // namespace reifkb
