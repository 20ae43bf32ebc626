#ifndef SFL_MATRIX_HPP
#define SFL_MATRIX_HPP

#include <vector>

#include "sfl/numbers.hpp"

namespace sfl {

// Dense matrix of arbitrary-precision integers, row-major.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(int rows, int cols) : rows_(rows), cols_(cols), e_(size_t(rows) * cols, Int(0)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
  }
  static IntMatrix identity(int n);
  static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);
  static IntMatrix from_columns(const std::vector<std::vector<Int>>& cols, int rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  Int& at(int i, int j) { return e_[size_t(i) * cols_ + j]; }
  const Int& at(int i, int j) const { return e_[size_t(i) * cols_ + j]; }

  std::vector<Int> column(int j) const;
  IntMatrix columns(const std::vector<int>& idx) const;
  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator*(const Int& s) const;
  bool operator==(const IntMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }

  // Append columns of o on the right (row counts must match).
  IntMatrix hcat(const IntMatrix& o) const;

  void swap_rows(int i, int j);
  void swap_cols(int i, int j);
  void add_row_multiple(int dst, int src, const Int& q);  // row dst += q*row src
  void add_col_multiple(int dst, int src, const Int& q);  // col dst += q*col src
  void negate_row(int i);
  void negate_col(int j);

  // Exact determinant (Bareiss fraction-free elimination); square only.
  Int determinant() const;

  std::string str() const;

 private:
  int rows_, cols_;
  std::vector<Int> e_;
};

// Minimal rational and quadratic-field matrices. These appear only in the
// action layer (split linear systems, field ranks), so they stay lean.
struct RatMatrix {
  int rows = 0, cols = 0;
  std::vector<Rat> e;
  RatMatrix() = default;
  RatMatrix(int r, int c) : rows(r), cols(c), e(size_t(r) * c, Rat(0)) {}
  Rat& at(int i, int j) { return e[size_t(i) * cols + j]; }
  const Rat& at(int i, int j) const { return e[size_t(i) * cols + j]; }
};

struct QuadMatrix {
  int rows = 0, cols = 0;
  std::vector<Quadratic> e;
  QuadMatrix() = default;
  QuadMatrix(int r, int c) : rows(r), cols(c), e(size_t(r) * c) {}
  Quadratic& at(int i, int j) { return e[size_t(i) * cols + j]; }
  const Quadratic& at(int i, int j) const { return e[size_t(i) * cols + j]; }
  static QuadMatrix identity(int n);
  QuadMatrix operator*(const QuadMatrix& o) const;
  QuadMatrix operator*(const IntMatrix& o) const;
};

// Rank over Q by exact Gaussian elimination.
int rat_rank(RatMatrix m);

// Rank over the quadratic field Q(sqrt(D)) by exact elimination.
int field_rank(QuadMatrix m);

// Inverse over the field; throws if singular.
QuadMatrix field_inverse(QuadMatrix m);

// Stack the rational and surd components of a quadratic matrix into a
// 2r x c rational matrix. A vector x in Q^c satisfies M x = 0 over the field
// iff split_components(M) x = 0 over Q.
RatMatrix split_components(const QuadMatrix& m);

// Clear denominators row by row, preserving the rational row space.
IntMatrix integerize_rows(const RatMatrix& m);

}  // namespace sfl

#endif  // SFL_MATRIX_HPP
