#include "reifkb/dense.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "reifkb/errors.h"
#include "reifkb/parallel.h"

namespace reifkb {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix data has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(rows_ * cols_));
  }
}

Matrix Matrix::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged rows in Matrix::FromRows");
    std::copy(row.begin(), row.end(), m.row(i++).begin());
  }
  return m;
}

Matrix Matrix::RowVector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Matrix::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string Matrix::ShapeString() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

void CheckSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.SameShape(b)) {
    throw ShapeError(std::string(what) + ": shape " + a.ShapeString() + " vs " +
                     b.ShapeString());
  }
}

double MaxAbsDiff(const Matrix& a, const Matrix& b) {
  CheckSameShape(a, b, "MaxAbsDiff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

bool AllFinite(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("MatMul: " + a.ShapeString() + " * " + b.ShapeString());
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix out(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
#pragma omp parallel for schedule(static) if (n * k * m > 65536)
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = po + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Matrix MatMulTA(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("MatMulTA: " + a.ShapeString() + "^T * " + b.ShapeString());
  }
  const std::size_t n = a.cols(), k = a.rows(), m = b.cols();
  Matrix out(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
#pragma omp parallel for schedule(static) if (n * k * m > 65536)
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = po + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[p * n + i];
      const double* brow = pb + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

Matrix MatMulTB(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("MatMulTB: " + a.ShapeString() + " * " + b.ShapeString() + "^T");
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  Matrix out(n, m);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
#pragma omp parallel for schedule(static) if (n * k * m > 65536)
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = pa + i * k;
    for (std::size_t j = 0; j < m; ++j) {
      const double* brow = pb + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      po[i * m + j] = acc;
    }
  }
  return out;
}

Matrix Hadamard(const Matrix& a, const Matrix& b) {
  CheckSameShape(a, b, "Hadamard");
  Matrix out(a.rows(), a.cols());
  const std::size_t n = a.size();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
#pragma omp parallel for schedule(static) if (n > 65536)
  for (std::size_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  return out;
}

void AddInPlace(Matrix* y, const Matrix& x) {
  CheckSameShape(*y, x, "AddInPlace");
  const std::size_t n = x.size();
  double* py = y->data().data();
  const double* px = x.data().data();
#pragma omp parallel for schedule(static) if (n > 65536)
  for (std::size_t i = 0; i < n; ++i) py[i] += px[i];
}

void AxpyInPlace(Matrix* y, double alpha, const Matrix& x) {
  CheckSameShape(*y, x, "AxpyInPlace");
  const std::size_t n = x.size();
  double* py = y->data().data();
  const double* px = x.data().data();
#pragma omp parallel for schedule(static) if (n > 65536)
  for (std::size_t i = 0; i < n; ++i) py[i] += alpha * px[i];
}

void AddColumnScaledInPlace(Matrix* y, const Matrix& w, std::size_t col, const Matrix& x) {
  CheckSameShape(*y, x, "AddColumnScaledInPlace");
  if (w.rows() != x.rows() || col >= w.cols()) {
    throw ShapeError("AddColumnScaledInPlace: weight matrix " + w.ShapeString() +
                     " incompatible with " + x.ShapeString());
  }
  const std::size_t rows = x.rows(), cols = x.cols();
#pragma omp parallel for schedule(static) if (rows * cols > 65536)
  for (std::size_t i = 0; i < rows; ++i) {
    const double s = w(i, col);
    double* py = y->data().data() + i * cols;
    const double* px = x.data().data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) py[j] += s * px[j];
  }
}

}  // namespace reifkb
