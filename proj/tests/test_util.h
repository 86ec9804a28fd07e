#ifndef REIFKB_TESTS_TEST_UTIL_H_
#define REIFKB_TESTS_TEST_UTIL_H_

#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "reifkb/dense.h"
#include "reifkb/kb.h"
#include "reifkb/synth.h"

namespace reifkb::testing {

// n x n grid, cell id = row * n + col, relations north(0) south(1) east(2)
// west(3). Built directly here so tests do not depend on the generators.
inline KnowledgeBase SmallGrid(int n) {
  Schema schema;
  std::vector<std::string> names;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) names.push_back("cell_" + std::to_string(r) + "_" + std::to_string(c));
  schema.AddType("cell", names);
  for (const char* rel : {"north", "south", "east", "west"}) schema.AddRelation(rel, 0, 0);
  std::vector<Triple> triples;
  const int dr[] = {-1, 1, 0, 0};
  const int dc[] = {0, 0, 1, -1};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (int k = 0; k < 4; ++k) {
        int rr = r + dr[k], cc = c + dc[k];
        if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
        triples.push_back({static_cast<Index>(r * n + c), static_cast<RelationId>(k),
                           static_cast<Index>(rr * n + cc), 1.0});
      }
    }
  }
  return KnowledgeBase::Build(std::move(schema), triples);
}

inline Index Cell(int n, int row, int col) { return static_cast<Index>(row * n + col); }

using reifkb::RandomKbSpec;

inline KnowledgeBase RandomKb(std::mt19937_64& rng, const RandomKbSpec& spec) {
  return reifkb::RandomKb(rng, spec);
}

inline Matrix RandomNonNegative(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng) < zero_fraction ? 0.0 : u(rng);
  return m;
}

inline Matrix RandomSigned(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

// Brute-force dense product x * M for a sparse COO matrix.
inline Matrix DenseOracleProduct(const Matrix& x, const CooMatrix& m, bool transpose) {
  std::vector<std::vector<double>> dense(m.rows(), std::vector<double>(m.cols(), 0.0));
  for (const auto& e : m.entries()) dense[e.row][e.col] = e.value;
  const std::size_t out_dim = transpose ? m.rows() : m.cols();
  Matrix out(x.rows(), out_dim);
  for (std::size_t b = 0; b < x.rows(); ++b) {
    for (std::size_t j = 0; j < out_dim; ++j) {
      long double acc = 0.0L;
      for (std::size_t i = 0; i < x.cols(); ++i) {
        acc += static_cast<long double>(x(b, i)) * (transpose ? dense[j][i] : dense[i][j]);
      }
      out(b, j) = static_cast<double>(acc);
    }
  }
  return out;
}

inline std::set<Index> Support(const Matrix& m, std::size_t row = 0) {
  std::set<Index> out;
  for (std::size_t j = 0; j < m.cols(); ++j)
    if (m(row, j) > 0.0) out.insert(static_cast<Index>(j));
  return out;
}

}  // namespace reifkb::testing

#endif  // REIFKB_TESTS_TEST_UTIL_H_
