#include "reifkb/kb.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "reifkb/errors.h"
#include "reifkb/hash.h"

namespace reifkb {

std::string HexDigest(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

TypeId Schema::AddType(std::string name, std::size_t cardinality) {
  if (cardinality == 0) throw SchemaError("type '" + name + "' has zero cardinality");
  std::vector<std::string> names;
  names.reserve(cardinality);
  for (std::size_t i = 0; i < cardinality; ++i) names.push_back(name + "_" + std::to_string(i));
  return AddType(std::move(name), std::move(names));
}

TypeId Schema::AddType(std::string name, std::vector<std::string> entity_names) {
  if (entity_names.empty()) throw SchemaError("type '" + name + "' has zero cardinality");
  if (type_index_.count(name)) throw SchemaError("duplicate type '" + name + "'");
  EntityType t;
  t.name = name;
  t.entity_names = std::move(entity_names);
  for (std::size_t i = 0; i < t.entity_names.size(); ++i) {
    if (!t.index.emplace(t.entity_names[i], static_cast<Index>(i)).second) {
      throw SchemaError("duplicate entity '" + t.entity_names[i] + "' in type '" + name + "'");
    }
  }
  TypeId id = static_cast<TypeId>(types_.size());
  type_index_.emplace(name, id);
  types_.push_back(std::move(t));
  return id;
}

RelationId Schema::AddRelation(std::string name, TypeId subject_type, TypeId object_type) {
  if (subject_type >= types_.size() || object_type >= types_.size()) {
    throw SchemaError("relation '" + name + "' refers to an undeclared type");
  }
  if (relation_index_.count(name)) throw SchemaError("duplicate relation '" + name + "'");
  RelationId id = static_cast<RelationId>(relations_.size());
  relation_index_.emplace(name, id);
  relations_.push_back({std::move(name), subject_type, object_type});
  return id;
}

RelationId Schema::AddRelation(std::string name, std::string_view subject_type,
                               std::string_view object_type) {
  auto find = [&](std::string_view t) {
    auto it = type_index_.find(std::string(t));
    if (it == type_index_.end()) {
      throw SchemaError("relation '" + name + "' refers to unknown type '" + std::string(t) + "'");
    }
    return it->second;
  };
  TypeId s = find(subject_type);
  TypeId o = find(object_type);
  return AddRelation(std::move(name), s, o);
}

std::size_t Schema::num_entities() const {
  std::size_t n = 0;
  for (const auto& t : types_) n += t.cardinality();
  return n;
}

const EntityType& Schema::type(TypeId t) const {
  if (t >= types_.size()) throw LookupError("unknown type id " + std::to_string(t));
  return types_[t];
}

const RelationDecl& Schema::relation(RelationId r) const {
  if (r >= relations_.size()) throw LookupError("unknown relation id " + std::to_string(r));
  return relations_[r];
}

TypeId Schema::TypeIndex(std::string_view name) const {
  auto it = type_index_.find(std::string(name));
  if (it == type_index_.end()) throw LookupError("unknown type '" + std::string(name) + "'");
  return it->second;
}

RelationId Schema::RelationIndex(std::string_view name) const {
  auto found = FindRelation(name);
  if (!found) throw LookupError("unknown relation '" + std::string(name) + "'");
  return *found;
}

std::optional<RelationId> Schema::FindRelation(std::string_view name) const {
  auto it = relation_index_.find(std::string(name));
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

Index Schema::EntityIndex(TypeId type_id, std::string_view name) const {
  const EntityType& t = type(type_id);
  auto it = t.index.find(std::string(name));
  if (it == t.index.end()) {
    throw LookupError("unknown entity '" + std::string(name) + "' of type '" + t.name + "'");
  }
  return it->second;
}

const std::string& Schema::EntityName(TypeId type_id, Index index) const {
  const EntityType& t = type(type_id);
  if (index >= t.cardinality()) {
    throw LookupError("entity index " + std::to_string(index) + " out of range for type '" +
                      t.name + "'");
  }
  return t.entity_names[index];
}

bool Schema::operator==(const Schema& other) const {
  if (types_.size() != other.types_.size() || relations_.size() != other.relations_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i].name != other.types_[i].name ||
        types_[i].entity_names != other.types_[i].entity_names) {
      return false;
    }
  }
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto& a = relations_[i];
    const auto& b = other.relations_[i];
    if (a.name != b.name || a.subject_type != b.subject_type || a.object_type != b.object_type) {
      return false;
    }
  }
  return true;
}

namespace {

std::string DescribeTriple(const Schema& schema, const Triple& t, std::size_t position) {
  std::string rel = t.rel < schema.num_relations() ? schema.relation(t.rel).name
                                                   : "#" + std::to_string(t.rel);
  return "triple " + std::to_string(position) + " (" + std::to_string(t.subj) + ", " + rel +
         ", " + std::to_string(t.obj) + ")";
}

}  // namespace

KnowledgeBase KnowledgeBase::Build(Schema schema, std::span<const Triple> triples) {
  KnowledgeBase kb;
  std::map<std::tuple<Index, RelationId, Index>, std::size_t> seen;
  for (std::size_t pos = 0; pos < triples.size(); ++pos) {
    const Triple& t = triples[pos];
    if (t.rel >= schema.num_relations()) {
      throw SchemaError(DescribeTriple(schema, t, pos) + ": relation index out of range");
    }
    const RelationDecl& decl = schema.relation(t.rel);
    if (t.subj >= schema.type(decl.subject_type).cardinality() ||
        t.obj >= schema.type(decl.object_type).cardinality()) {
      throw SchemaError(DescribeTriple(schema, t, pos) + ": entity index out of range for '" +
                        decl.name + "'");
    }
    if (!(t.weight >= 0.0) || !std::isfinite(t.weight)) {
      throw ValidationError(DescribeTriple(schema, t, pos) + ": invalid weight " +
                            std::to_string(t.weight));
    }
    auto [it, inserted] = seen.emplace(std::make_tuple(t.subj, t.rel, t.obj), kb.triples_.size());
    if (inserted) {
      kb.triples_.push_back(t);
    } else {
      kb.triples_[it->second].weight += t.weight;
    }
  }

  const std::size_t nr = schema.num_relations();
  std::vector<std::vector<CooEntry>> per_relation(nr);
  for (const Triple& t : kb.triples_) per_relation[t.rel].push_back({t.subj, t.obj, t.weight});
  kb.relation_matrices_.reserve(nr);
  kb.relation_counts_.reserve(nr);
  for (RelationId r = 0; r < nr; ++r) {
    const RelationDecl& decl = schema.relation(r);
    kb.relation_counts_.push_back(per_relation[r].size());
    kb.relation_coo_.push_back(CooMatrix::FromEntries(
        schema.type(decl.subject_type).cardinality(), schema.type(decl.object_type).cardinality(),
        std::move(per_relation[r])));
    kb.relation_matrices_.emplace_back(kb.relation_coo_.back());
  }

  Fnv1a h;
  h.U64(schema.num_types());
  for (TypeId t = 0; t < schema.num_types(); ++t) {
    h.Str(schema.type(t).name);
    h.U64(schema.type(t).cardinality());
  }
  h.U64(nr);
  for (const auto& decl : schema.relations()) {
    h.Str(decl.name);
    h.U64(decl.subject_type);
    h.U64(decl.object_type);
  }
  h.U64(kb.triples_.size());
  for (const Triple& t : kb.triples_) {
    h.U64(t.subj);
    h.U64(t.rel);
    h.U64(t.obj);
    h.F64(t.weight);
  }
  kb.fingerprint_ = h.digest();
  kb.schema_ = std::move(schema);
  return kb;
}

const SparseMatrix& KnowledgeBase::RelationMatrix(RelationId rel) const {
  if (rel >= relation_matrices_.size()) {
    throw LookupError("unknown relation index " + std::to_string(rel));
  }
  return relation_matrices_[rel];
}

const CooMatrix& KnowledgeBase::RelationCoo(RelationId rel) const {
  if (rel >= relation_coo_.size()) {
    throw LookupError("unknown relation index " + std::to_string(rel));
  }
  return relation_coo_[rel];
}

std::size_t KnowledgeBase::RelationTripleCount(RelationId rel) const {
  if (rel >= relation_counts_.size()) {
    throw LookupError("unknown relation index " + std::to_string(rel));
  }
  return relation_counts_[rel];
}

bool KnowledgeBase::IsHard() const {
  for (const Triple& t : triples_) {
    if (t.weight != 1.0) return false;
  }
  return true;
}

bool KnowledgeBase::TypeCompatible() const {
  const auto& rels = schema_.relations();
  for (const auto& decl : rels) {
    if (decl.subject_type != rels.front().subject_type ||
        decl.object_type != rels.front().object_type) {
      return false;
    }
  }
  return true;
}

TypeId KnowledgeBase::FollowSubjectType() const {
  if (!TypeCompatible()) {
    throw SchemaError("relations are not type-compatible; use SignatureView to select one signature");
  }
  if (num_relations() > 0) return schema_.relation(0).subject_type;
  if (schema_.num_types() == 1) return 0;
  throw SchemaError("knowledge base without relations has no follow signature");
}

TypeId KnowledgeBase::FollowObjectType() const {
  if (!TypeCompatible()) {
    throw SchemaError("relations are not type-compatible; use SignatureView to select one signature");
  }
  if (num_relations() > 0) return schema_.relation(0).object_type;
  if (schema_.num_types() == 1) return 0;
  throw SchemaError("knowledge base without relations has no follow signature");
}

std::size_t KnowledgeBase::FollowInputDim() const {
  return schema_.type(FollowSubjectType()).cardinality();
}

std::size_t KnowledgeBase::FollowOutputDim() const {
  return schema_.type(FollowObjectType()).cardinality();
}

KnowledgeBase KnowledgeBase::SignatureView(TypeId subject_type, TypeId object_type) const {
  Schema view;
  for (TypeId t = 0; t < schema_.num_types(); ++t) {
    view.AddType(schema_.type(t).name, schema_.type(t).entity_names);
  }
  std::vector<std::optional<RelationId>> remap(num_relations());
  for (RelationId r = 0; r < num_relations(); ++r) {
    const RelationDecl& decl = schema_.relation(r);
    if (decl.subject_type == subject_type && decl.object_type == object_type) {
      remap[r] = view.AddRelation(decl.name, decl.subject_type, decl.object_type);
    }
  }
  std::vector<Triple> kept;
  for (const Triple& t : triples_) {
    if (remap[t.rel]) kept.push_back({t.subj, *remap[t.rel], t.obj, t.weight});
  }
  return Build(std::move(view), kept);
}

}  // namespace reifkb
