#include "sfl/matrix.hpp"

#include <sstream>

namespace sfl {

IntMatrix IntMatrix::identity(int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long>>& rows) {
  if (rows.empty()) return IntMatrix(0, 0);
  IntMatrix m(int(rows.size()), int(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw std::invalid_argument("ragged row lengths");
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::from_columns(const std::vector<std::vector<Int>>& cols, int rows) {
  IntMatrix m(rows, int(cols.size()));
  for (int j = 0; j < m.cols(); ++j) {
    if (int(cols[j].size()) != rows) throw std::invalid_argument("bad column length");
    for (int i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
  }
  return m;
}

std::vector<Int> IntMatrix::column(int j) const {
  std::vector<Int> c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = at(i, j);
  return c;
}

IntMatrix IntMatrix::columns(const std::vector<int>& idx) const {
  IntMatrix m(rows_, int(idx.size()));
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < rows_; ++i) m.at(i, j) = at(i, idx[j]);
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
  IntMatrix m(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int l = 0; l < cols_; ++l) {
      if (at(i, l) == 0) continue;
      for (int j = 0; j < o.cols_; ++j) m.at(i, j) += at(i, l) * o.at(l, j);
    }
  return m;
}

IntMatrix IntMatrix::operator*(const Int& s) const {
  IntMatrix m(*this);
  for (auto& x : m.e_) x *= s;
  return m;
}

IntMatrix IntMatrix::hcat(const IntMatrix& o) const {
  if (rows_ != o.rows_) throw std::invalid_argument("hcat row mismatch");
  IntMatrix m(rows_, cols_ + o.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) m.at(i, j) = at(i, j);
    for (int j = 0; j < o.cols_; ++j) m.at(i, cols_ + j) = o.at(i, j);
  }
  return m;
}

void IntMatrix::swap_rows(int i, int j) {
  if (i == j) return;
  for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
}

void IntMatrix::swap_cols(int i, int j) {
  if (i == j) return;
  for (int r = 0; r < rows_; ++r) std::swap(at(r, i), at(r, j));
}

void IntMatrix::add_row_multiple(int dst, int src, const Int& q) {
  if (q == 0) return;
  for (int c = 0; c < cols_; ++c) at(dst, c) += q * at(src, c);
}

void IntMatrix::add_col_multiple(int dst, int src, const Int& q) {
  if (q == 0) return;
  for (int r = 0; r < rows_; ++r) at(r, dst) += q * at(r, src);
}

void IntMatrix::negate_row(int i) {
  for (int c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
}

void IntMatrix::negate_col(int j) {
  for (int r = 0; r < rows_; ++r) at(r, j) = -at(r, j);
}

Int IntMatrix::determinant() const {
  if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
  int n = rows_;
  if (n == 0) return Int(1);
  IntMatrix w(*this);
  Int prev(1);
  int sign = 1;
  for (int t = 0; t < n - 1; ++t) {
    if (w.at(t, t) == 0) {
      int piv = -1;
      for (int i = t + 1; i < n; ++i)
        if (w.at(i, t) != 0) { piv = i; break; }
      if (piv < 0) return Int(0);
      w.swap_rows(t, piv);
      sign = -sign;
    }
    for (int i = t + 1; i < n; ++i) {
      for (int j = t + 1; j < n; ++j) {
        Int num = w.at(i, j) * w.at(t, t) - w.at(i, t) * w.at(t, j);
        // Bareiss: division by the previous pivot is exact.
        mpz_divexact(w.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      w.at(i, t) = 0;
    }
    prev = w.at(t, t);
  }
  Int d = w.at(n - 1, n - 1);
  return sign > 0 ? d : Int(-d);
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows_; ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < cols_; ++j) os << (j ? " " : "") << at(i, j).get_str();
  }
  os << "]";
  return os.str();
}

QuadMatrix QuadMatrix::identity(int n) {
  QuadMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Quadratic(1);
  return m;
}

QuadMatrix QuadMatrix::operator*(const QuadMatrix& o) const {
  if (cols != o.rows) throw std::invalid_argument("matrix product shape mismatch");
  QuadMatrix m(rows, o.cols);
  for (int i = 0; i < rows; ++i)
    for (int l = 0; l < cols; ++l) {
      if (at(i, l).is_zero()) continue;
      for (int j = 0; j < o.cols; ++j) m.at(i, j) += at(i, l) * o.at(l, j);
    }
  return m;
}

QuadMatrix QuadMatrix::operator*(const IntMatrix& o) const {
  if (cols != o.rows()) throw std::invalid_argument("matrix product shape mismatch");
  QuadMatrix m(rows, o.cols());
  for (int i = 0; i < rows; ++i)
    for (int l = 0; l < cols; ++l) {
      if (at(i, l).is_zero()) continue;
      for (int j = 0; j < o.cols(); ++j)
        m.at(i, j) += at(i, l) * Quadratic(Rat(o.at(l, j)));
    }
  return m;
}

int rat_rank(RatMatrix m) {
  int rank = 0;
  for (int col = 0; col < m.cols && rank < m.rows; ++col) {
    int piv = -1;
    for (int i = rank; i < m.rows; ++i)
      if (m.at(i, col) != 0) { piv = i; break; }
    if (piv < 0) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(rank, j), m.at(piv, j));
    Rat inv = 1 / m.at(rank, col);
    for (int j = col; j < m.cols; ++j) m.at(rank, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == rank || m.at(i, col) == 0) continue;
      Rat f = m.at(i, col);
      for (int j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(rank, j);
    }
    ++rank;
  }
  return rank;
}

int field_rank(QuadMatrix m) {
  int rank = 0;
  for (int col = 0; col < m.cols && rank < m.rows; ++col) {
    int piv = -1;
    for (int i = rank; i < m.rows; ++i)
      if (!m.at(i, col).is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(rank, j), m.at(piv, j));
    Quadratic inv = m.at(rank, col).inverse();
    for (int j = col; j < m.cols; ++j) m.at(rank, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == rank || m.at(i, col).is_zero()) continue;
      Quadratic f = m.at(i, col);
      for (int j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(rank, j);
    }
    ++rank;
  }
  return rank;
}

QuadMatrix field_inverse(QuadMatrix m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
  int n = m.rows;
  QuadMatrix inv = QuadMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int i = col; i < n; ++i)
      if (!m.at(i, col).is_zero()) { piv = i; break; }
    if (piv < 0) throw std::domain_error("singular matrix");
    for (int j = 0; j < n; ++j) {
      std::swap(m.at(col, j), m.at(piv, j));
      std::swap(inv.at(col, j), inv.at(piv, j));
    }
    Quadratic s = m.at(col, col).inverse();
    for (int j = 0; j < n; ++j) {
      m.at(col, j) *= s;
      inv.at(col, j) *= s;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || m.at(i, col).is_zero()) continue;
      Quadratic f = m.at(i, col);
      for (int j = 0; j < n; ++j) {
        m.at(i, j) -= f * m.at(col, j);
        inv.at(i, j) -= f * inv.at(col, j);
      }
    }
  }
  return inv;
}

RatMatrix split_components(const QuadMatrix& m) {
  RatMatrix s(2 * m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      s.at(i, j) = m.at(i, j).rational_part();
      s.at(m.rows + i, j) = m.at(i, j).surd_part();
    }
  return s;
}

IntMatrix integerize_rows(const RatMatrix& m) {
  IntMatrix w(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i) {
    Int den(1);
    for (int j = 0; j < m.cols; ++j) den = lcm(den, m.at(i, j).get_den());
    for (int j = 0; j < m.cols; ++j) {
      Rat v = m.at(i, j) * Rat(den);
      v.canonicalize();
      if (v.get_den() != 1) throw std::logic_error("integerize_rows: residual denominator");
      w.at(i, j) = v.get_num();
    }
  }
  return w;
}

}  // namespace sfl
