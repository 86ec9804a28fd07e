#ifndef REIFKB_WEIGHTED_SET_H_
#define REIFKB_WEIGHTED_SET_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/kb.h"

namespace reifkb {

// What the components of a weighted-set vector index.
struct SetSpace {
  enum class Kind { kEntities, kRelations };
  Kind kind = Kind::kEntities;
  TypeId type = 0;  // entity type; unused for relation sets

  bool operator==(const SetSpace&) const = default;
};

// Dense encoding of a weighted set over one space. `values` is 1 x dim, or
// b x dim for a minibatch.
struct WeightedSet {
  SetSpace space;
  Matrix values;
};

using NamedWeights = std::map<std::string, double>;

std::size_t SpaceDim(const Schema& schema, SetSpace space);

// k-hot encoding of named members. LookupError on an unknown name,
// ValidationError on a negative weight.
WeightedSet KHotEncode(const Schema& schema, SetSpace space, const NamedWeights& members);

// Indices whose value is strictly greater than `threshold`, in ascending order.
std::vector<std::pair<Index, double>> SupportDecode(std::span<const double> values,
                                                    double threshold = 0.0);
NamedWeights SupportDecodeNames(const Schema& schema, SetSpace space,
                                std::span<const double> values, double threshold = 0.0);

// Hard-set helpers used by tests and generators.
Matrix OneHot(std::size_t dim, Index index);
Matrix KHot(std::size_t dim, std::span<const Index> indices);

}  // namespace reifkb

#endif  // REIFKB_WEIGHTED_SET_H_
