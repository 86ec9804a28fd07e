#ifndef REIFKB_KB_H_
#define REIFKB_KB_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reifkb/sparse.h"

namespace reifkb {

using TypeId = std::uint32_t;
using RelationId = std::uint32_t;

struct EntityType {
  std::string name;
  std::vector<std::string> entity_names;  // index within the type -> name
  std::unordered_map<std::string, Index> index;

  std::size_t cardinality() const { return entity_names.size(); }
};

struct RelationDecl {
  std::string name;
  TypeId subject_type = 0;
  TypeId object_type = 0;
};

// Typed schema: entity types with per-type name<->index bijections, and
// relations with a declared (subject type, object type) signature. An
// untyped KB is a schema with a single type.
class Schema {
 public:
  // Adds a type whose entities are named "<type>_<i>".
  TypeId AddType(std::string name, std::size_t cardinality);
  // Adds a type with explicit entity names; names must be unique.
  TypeId AddType(std::string name, std::vector<std::string> entity_names);
  RelationId AddRelation(std::string name, TypeId subject_type, TypeId object_type);
  RelationId AddRelation(std::string name, std::string_view subject_type,
                         std::string_view object_type);

  std::size_t num_types() const { return types_.size(); }
  std::size_t num_relations() const { return relations_.size(); }
  std::size_t num_entities() const;  // N_E summed over types

  const EntityType& type(TypeId t) const;
  const RelationDecl& relation(RelationId r) const;
  const std::vector<RelationDecl>& relations() const { return relations_; }

  TypeId TypeIndex(std::string_view name) const;
  RelationId RelationIndex(std::string_view name) const;
  std::optional<RelationId> FindRelation(std::string_view name) const;
  Index EntityIndex(TypeId type, std::string_view name) const;
  const std::string& EntityName(TypeId type, Index index) const;

  bool operator==(const Schema& other) const;

 private:
  std::vector<EntityType> types_;
  std::vector<RelationDecl> relations_;
  std::unordered_map<std::string, TypeId> type_index_;
  std::unordered_map<std::string, RelationId> relation_index_;
};

struct Triple {
  Index subj = 0;
  RelationId rel = 0;
  Index obj = 0;
  double weight = 1.0;

  bool operator==(const Triple&) const = default;
};

// Immutable knowledge base: schema, merged triples, and one sparse matrix
// per relation (subject-type rows, object-type columns). All relation
// matrices are built during construction, so a KnowledgeBase is safe to read
// from any number of threads.
class KnowledgeBase {
 public:
  // Validates and merges duplicate (subj, rel, obj) triples by summing their
  // weights; merged triples keep the order of first occurrence.
  static KnowledgeBase Build(Schema schema, std::span<const Triple> triples);

  const Schema& schema() const { return schema_; }
  const std::vector<Triple>& triples() const { return triples_; }

  std::size_t num_entities() const { return schema_.num_entities(); }
  std::size_t num_relations() const { return schema_.num_relations(); }
  std::size_t num_triples() const { return triples_.size(); }

  // Cached M_r. LookupError for an unknown relation.
  const SparseMatrix& RelationMatrix(RelationId rel) const;
  const CooMatrix& RelationCoo(RelationId rel) const;
  std::size_t RelationTripleCount(RelationId rel) const;
  bool IsHard() const;

  // Content hash of the schema shape and the merged triple list.
  std::uint64_t fingerprint() const { return fingerprint_; }

  // True when every relation shares one (subject type, object type)
  // signature, i.e. all relations are type-compatible and can be mixed.
  bool TypeCompatible() const;
  // The shared signature; SchemaError if relations are not type-compatible.
  TypeId FollowSubjectType() const;
  TypeId FollowObjectType() const;
  // Input (subject-side) and output (object-side) dimension of following.
  std::size_t FollowInputDim() const;
  std::size_t FollowOutputDim() const;

  // KB restricted to the relations with the given signature, renumbered in
  // their original order. Types and entity indices are unchanged.
  KnowledgeBase SignatureView(TypeId subject_type, TypeId object_type) const;

 private:
  KnowledgeBase() = default;

  Schema schema_;
  std::vector<Triple> triples_;
  std::vector<CooMatrix> relation_coo_;
  std::vector<SparseMatrix> relation_matrices_;
  std::vector<std::size_t> relation_counts_;
  std::uint64_t fingerprint_ = 0;
};

}  // namespace reifkb

#endif  // REIFKB_KB_H_
