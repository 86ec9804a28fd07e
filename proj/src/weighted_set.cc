#include "reifkb/weighted_set.h"

#include "reifkb/errors.h"

namespace reifkb {

std::size_t SpaceDim(const Schema& schema, SetSpace space) {
  if (space.kind == SetSpace::Kind::kRelations) return schema.num_relations();
  return schema.type(space.type).cardinality();
}

WeightedSet KHotEncode(const Schema& schema, SetSpace space, const NamedWeights& members) {
  WeightedSet set{space, Matrix(1, SpaceDim(schema, space))};
  for (const auto& [name, weight] : members) {
    if (!(weight >= 0.0)) throw ValidationError("negative weight for '" + name + "'");
    Index i = space.kind == SetSpace::Kind::kRelations ? schema.RelationIndex(name)
                                                       : schema.EntityIndex(space.type, name);
    set.values(0, i) = weight;
  }
  return set;
}

std::vector<std::pair<Index, double>> SupportDecode(std::span<const double> values,
                                                    double threshold) {
  std::vector<std::pair<Index, double>> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > threshold) out.emplace_back(static_cast<Index>(i), values[i]);
  }
  return out;
}

NamedWeights SupportDecodeNames(const Schema& schema, SetSpace space,
                                std::span<const double> values, double threshold) {
  if (values.size() != SpaceDim(schema, space)) {
    throw ShapeError("SupportDecodeNames: vector of length " + std::to_string(values.size()) +
                     " for a space of dimension " + std::to_string(SpaceDim(schema, space)));
  }
  NamedWeights out;
  for (const auto& [i, w] : SupportDecode(values, threshold)) {
    const std::string& name = space.kind == SetSpace::Kind::kRelations
                                  ? schema.relation(i).name
                                  : schema.EntityName(space.type, i);
    out.emplace(name, w);
  }
  return out;
}

Matrix OneHot(std::size_t dim, Index index) {
  if (index >= dim) throw ShapeError("OneHot index out of range");
  Matrix m(1, dim);
  m(0, index) = 1.0;
  return m;
}

Matrix KHot(std::size_t dim, std::span<const Index> indices) {
  Matrix m(1, dim);
  for (Index i : indices) {
    if (i >= dim) throw ShapeError("KHot index out of range");
    m(0, i) = 1.0;
  }
  return m;
}

}  // namespace reifkb
