#ifndef REIFKB_DENSE_H_
#define REIFKB_DENSE_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace reifkb {

// Row-major dense matrix of doubles. A minibatch of weighted sets is stored
// one example per row; a single set is a 1 x dim matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  // Builds a matrix from nested rows; all rows must have equal length.
  static Matrix FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix RowVector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void Fill(double value);
  bool SameShape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string ShapeString() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws ShapeError unless a and b have the same shape.
void CheckSameShape(const Matrix& a, const Matrix& b, const char* what);

// Largest absolute elementwise difference; ShapeError on mismatch.
double MaxAbsDiff(const Matrix& a, const Matrix& b);

bool AllFinite(const Matrix& m);

// Dense kernels. Each is parallelised over output rows; the per-element
// arithmetic is identical to a serial loop.
Matrix MatMul(const Matrix& a, const Matrix& b);    // a * b
Matrix MatMulTA(const Matrix& a, const Matrix& b);  // a^T * b
Matrix MatMulTB(const Matrix& a, const Matrix& b);  // a * b^T
Matrix Hadamard(const Matrix& a, const Matrix& b);
void AddInPlace(Matrix* y, const Matrix& x);                 // y += x
void AxpyInPlace(Matrix* y, double alpha, const Matrix& x);  // y += alpha x

// y[i, :] += w(i, col) * x[i, :] -- broadcasts one column of w over rows of x.
void AddColumnScaledInPlace(Matrix* y, const Matrix& w, std::size_t col, const Matrix& x);

}  // namespace reifkb

#endif  // REIFKB_DENSE_H_
