#ifndef REIFKB_ERRORS_H_
#define REIFKB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace reifkb {

// Base class for every error raised by the library. The CLI maps
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Index out of the range declared by the schema, or an ill-typed relation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Structurally valid input with an invalid value (e.g. a negative weight).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Unknown entity, relation, type, or parameter name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A derived structure does not belong to the knowledge base it is used with.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf produced in a forward or backward pass.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// Bad scalar argument (shard count, holdout fraction, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Batched input handed to a strategy that only supports one example.
class UnsupportedBatchError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, dataset, or file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Generated or loaded dataset cannot support the requested task.
class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace reifkb

#endif  // REIFKB_ERRORS_H_
