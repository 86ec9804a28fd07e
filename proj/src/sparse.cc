#include "reifkb/sparse.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "reifkb/errors.h"

namespace reifkb {

CooMatrix CooMatrix::FromEntries(std::size_t rows, std::size_t cols,
                                 std::vector<CooEntry> entries) {
  for (const CooEntry& e : entries) {
    if (e.row >= rows || e.col >= cols) {
      throw SchemaError("sparse entry (" + std::to_string(e.row) + ", " +
                        std::to_string(e.col) + ") outside " + std::to_string(rows) +
                        "x" + std::to_string(cols));
    }
    if (!(e.value >= 0.0) || !std::isfinite(e.value)) {
      throw ValidationError("sparse entry (" + std::to_string(e.row) + ", " +
                            std::to_string(e.col) + ") has invalid value " +
                            std::to_string(e.value));
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  CooMatrix out(rows, cols);
  out.entries_.reserve(entries.size());
  for (const CooEntry& e : entries) {
    if (!out.entries_.empty() && out.entries_.back().row == e.row &&
        out.entries_.back().col == e.col) {
      out.entries_.back().value += e.value;
    } else {
      out.entries_.push_back(e);
    }
  }
  return out;
}

CooMatrix SparseAdd(const CooMatrix& a, const CooMatrix& b, double alpha) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("SparseAdd: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  if (!(alpha >= 0.0)) throw ValidationError("SparseAdd: negative mixing weight");
  CooMatrix out(a.rows(), a.cols());
  out.entries_.reserve(a.nnz() + (alpha == 0.0 ? 0 : b.nnz()));
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0, j = 0;
  auto less = [](const CooEntry& x, const CooEntry& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  };
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && less(ea[i], eb[j]))) {
      out.entries_.push_back(ea[i++]);
    } else if (i == ea.size() || less(eb[j], ea[i])) {
      if (alpha != 0.0) out.entries_.push_back({eb[j].row, eb[j].col, alpha * eb[j].value});
      ++j;
    } else {
      out.entries_.push_back({ea[i].row, ea[i].col, ea[i].value + alpha * eb[j].value});
      ++i;
      ++j;
    }
  }
  return out;
}

CsrMatrix CsrMatrix::FromCoo(const CooMatrix& coo) {
  CsrMatrix csr;
  csr.rows_ = coo.rows();
  csr.cols_ = coo.cols();
  csr.row_ptr_.assign(coo.rows() + 1, 0);
  csr.col_idx_.reserve(coo.nnz());
  csr.values_.reserve(coo.nnz());
  for (const CooEntry& e : coo.entries()) {
    ++csr.row_ptr_[e.row + 1];
    csr.col_idx_.push_back(e.col);
    csr.values_.push_back(e.value);
  }
  for (std::size_t r = 0; r < csr.rows_; ++r) csr.row_ptr_[r + 1] += csr.row_ptr_[r];
  return csr;
}

CooMatrix CsrMatrix::ToCoo() const {
  std::vector<CooEntry> entries;
  entries.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      entries.push_back({static_cast<Index>(r), col_idx_[k], values_[k]});
    }
  }
  return CooMatrix::FromEntries(rows_, cols_, std::move(entries));
}

CsrMatrix CsrMatrix::Transposed() const {
  CsrMatrix t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.row_ptr_.assign(cols_ + 1, 0);
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  for (Index c : col_idx_) ++t.row_ptr_[c + 1];
  for (std::size_t c = 0; c < cols_; ++c) t.row_ptr_[c + 1] += t.row_ptr_[c];
  std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  // Visiting source rows in ascending order keeps each transposed row sorted.
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t dst = next[col_idx_[k]]++;
      t.col_idx_[dst] = static_cast<Index>(r);
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

Matrix SpMM(const Matrix& x, const SparseMatrix& m, bool transpose) {
  // x * M gathers over rows of M^T; x * M^T gathers over rows of M.
  const CsrMatrix& gather = transpose ? m.csr() : m.csr_transposed();
  const std::size_t in_dim = gather.cols();
  const std::size_t out_dim = gather.rows();
  if (x.cols() != in_dim) {
    throw ShapeError("SpMM: input " + x.ShapeString() + " against sparse " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     (transpose ? " (transposed)" : ""));
  }
  const std::size_t batch = x.rows();
  Matrix out(batch, out_dim);
  const std::size_t* ptr = gather.row_ptr().data();
  const Index* idx = gather.col_idx().data();
  const double* val = gather.values().data();
  const double* px = x.data().data();
  double* po = out.data().data();
  const long long total = static_cast<long long>(batch * out_dim);
#pragma omp parallel for schedule(static) if (total > 4096)
  for (long long flat = 0; flat < total; ++flat) {
    const std::size_t b = static_cast<std::size_t>(flat) / out_dim;
    const std::size_t j = static_cast<std::size_t>(flat) % out_dim;
    const double* xrow = px + b * in_dim;
    double acc = 0.0;
    for (std::size_t k = ptr[j]; k < ptr[j + 1]; ++k) acc += xrow[idx[k]] * val[k];
    po[flat] = acc;
  }
  return out;
}

Matrix SpMMCoo(const Matrix& x, const CooMatrix& m, bool transpose) {
  const std::size_t in_dim = transpose ? m.cols() : m.rows();
  const std::size_t out_dim = transpose ? m.rows() : m.cols();
  if (x.cols() != in_dim) {
    throw ShapeError("SpMMCoo: input " + x.ShapeString() + " against sparse " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  Matrix out(x.rows(), out_dim);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    for (const CooEntry& e : m.entries()) {
      if (transpose) {
        out(b, e.row) += x(b, e.col) * e.value;
      } else {
        out(b, e.col) += x(b, e.row) * e.value;
      }
    }
  }
  return out;
}

}  // namespace reifkb
