#ifndef REIFKB_SPARSE_H_
#define REIFKB_SPARSE_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "reifkb/dense.h"

namespace reifkb {

using Index = std::uint32_t;

struct CooEntry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  bool operator==(const CooEntry&) const = default;
};

// Coordinate-pair sparse matrix. Entries are kept sorted by (row, col) with
// no duplicate coordinates and non-negative values.
class CooMatrix {
 public:
  CooMatrix() = default;
  CooMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  // Validates ranges and signs, sorts, and merges duplicates by summation.
  static CooMatrix FromEntries(std::size_t rows, std::size_t cols,
                               std::vector<CooEntry> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<CooEntry>& entries() const { return entries_; }

  bool operator==(const CooMatrix&) const = default;

 private:
  friend CooMatrix SparseAdd(const CooMatrix& a, const CooMatrix& b, double alpha);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<CooEntry> entries_;
};

// a + alpha * b by a sorted merge; O(nnz(a) + nnz(b)). alpha must be >= 0.
CooMatrix SparseAdd(const CooMatrix& a, const CooMatrix& b, double alpha);

// Compressed sparse rows.
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  static CsrMatrix FromCoo(const CooMatrix& coo);

  CooMatrix ToCoo() const;
  CsrMatrix Transposed() const;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// A sparse matrix with both M and M^T materialised in CSR form, so that
// x*M and x*M^T are both row gathers.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(const CooMatrix& coo)
      : forward_(CsrMatrix::FromCoo(coo)), transposed_(forward_.Transposed()) {}

  std::size_t rows() const { return forward_.rows(); }
  std::size_t cols() const { return forward_.cols(); }
  std::size_t nnz() const { return forward_.nnz(); }

  const CsrMatrix& csr() const { return forward_; }
  const CsrMatrix& csr_transposed() const { return transposed_; }
  CooMatrix ToCoo() const { return forward_.ToCoo(); }

 private:
  CsrMatrix forward_;
  CsrMatrix transposed_;
};

// Dense-times-sparse product: x * M, or x * M^T when `transpose` is set.
// x is b x rows(M) (b x cols(M) when transposed). Each output element is
// accumulated in ascending order of the contributing nonzero, so the result
// is bitwise identical across thread counts and to SpMMCoo.
Matrix SpMM(const Matrix& x, const SparseMatrix& m, bool transpose = false);

// Serial scatter over the sorted COO entries. This is the reference the
// parallel kernel is tested against; naive mixing also uses it directly on
// the freshly mixed COO matrix.
Matrix SpMMCoo(const Matrix& x, const CooMatrix& m, bool transpose = false);

}  // namespace reifkb

#endif  // REIFKB_SPARSE_H_
