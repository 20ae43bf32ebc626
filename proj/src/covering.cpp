#include "sfl/covering.hpp"

#include <cstdlib>

namespace sfl {

namespace {

// Adjugate and determinant of a square integer matrix, exact.
// adj(B) * B = det(B) * I.
IntMatrix adjugate(const IntMatrix& b, Int& det) {
  const int n = b.rows();
  det = b.determinant();
  IntMatrix adj(n, n);
  if (n == 1) {
    adj.at(0, 0) = 1;
    return adj;
  }
  IntMatrix minor(n - 1, n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor.at(mr, mc) = b.at(r, c);
          ++mc;
        }
        ++mr;
      }
      Int cof = minor.determinant();
      if ((i + j) % 2 != 0) cof = -cof;
      adj.at(j, i) = cof;  // transpose of the cofactor matrix
    }
  return adj;
}

// Odometer over the integer box [-bound, bound]^d.
bool next_point(std::vector<long>& p, long bound) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < bound) {
      ++p[i];
      for (size_t j = 0; j < i; ++j) p[j] = -bound;
      return true;
    }
  }
  return false;
}

}  // namespace

bool verify_covering(long m_bound, const IntMatrix& u, const IntMatrix& v,
                     long n, int level) {
  if (m_bound < 0) throw std::invalid_argument("verify_covering: M must be >= 0");
  if (n < 1) throw std::invalid_argument("verify_covering: n must be >= 1");
  if (level < 0) throw std::invalid_argument("verify_covering: level must be >= 0");

  const int d = u.empty() ? v.rows() : u.rows();
  if ((!u.empty() && u.rows() != d) || (!v.empty() && v.rows() != d))
    throw std::invalid_argument("verify_covering: row count mismatch");
  IntMatrix basis = u.empty() ? v : (v.empty() ? u : u.hcat(v));
  if (basis.cols() != d)
    throw std::invalid_argument("verify_covering: need exactly d = p + q vectors");
  Int det;
  IntMatrix adj = adjugate(basis, det);
  if (det == 0)
    throw std::invalid_argument("verify_covering: u and v are rationally dependent");

  // Work on the grid scaled by 2^level so that everything is integral.
  const long scale = 1L << level;
  const Int grid_bound = Int(n) * scale;
  const Int y_bound = Int(m_bound) * scale;
  const Int coef_bound = Int(m_bound) * Int(n) * scale;
  if (grid_bound > 1000000)
    throw std::invalid_argument("verify_covering: grid too large for enumeration");
  const long gb = long(grid_bound.get_si());
  const long yb = long(y_bound.get_si());

  std::vector<Int> rhs(d), coef(d);
  auto feasible_with_y = [&](const std::vector<long>& g, const std::vector<long>& y) {
    for (int i = 0; i < d; ++i) rhs[i] = Int(g[i] - y[i]);
    for (int i = 0; i < d; ++i) {
      Int w(0);
      for (int l = 0; l < d; ++l) w += adj.at(i, l) * rhs[l];
      if (!divides(det, w)) return false;
      coef[i] = w / det;
      if (coef[i] > coef_bound || coef[i] < -coef_bound) return false;
    }
    return true;
  };

  std::vector<long> g(d, -gb);
  std::vector<long> y(d);
  do {
    // Clamping g into the y-box is usually already feasible; try it first.
    for (int i = 0; i < d; ++i) y[i] = std::max(-yb, std::min(yb, g[i]));
    bool ok = feasible_with_y(g, y);
    if (!ok) {
      std::vector<long> yy(d, -yb);
      do {
        if (feasible_with_y(g, yy)) {
          ok = true;
          break;
        }
      } while (next_point(yy, yb));
    }
    if (!ok) return false;
  } while (next_point(g, gb));
  return true;
}

std::optional<long> covering_constant_search(const IntMatrix& u, const IntMatrix& v,
                                             long n_probe, int m_probe, long m_max) {
  if (n_probe < 1) throw std::invalid_argument("covering_constant_search: n_probe must be >= 1");
  if (m_probe < 0) throw std::invalid_argument("covering_constant_search: m_probe must be >= 0");
  for (long m_bound = 1; m_bound <= m_max; ++m_bound) {
    bool all = true;
    for (long n = 1; n <= n_probe && all; ++n)
      for (int lev = 0; lev <= m_probe && all; ++lev)
        if (!verify_covering(m_bound, u, v, n, lev)) all = false;
    if (all) return m_bound;
  }
  return std::nullopt;
}

}  // namespace sfl
