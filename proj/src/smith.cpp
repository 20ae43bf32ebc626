#include "sfl/smith.hpp"

namespace sfl {

namespace {

// Bookkeeping for the elementary operations of the Smith reduction.
// Invariants maintained throughout: w = u * m * v and u * u_inv = I.
struct Work {
  IntMatrix w, u, u_inv, v;

  void swap_rows(int i, int j) {
    w.swap_rows(i, j);
    u.swap_rows(i, j);
    u_inv.swap_cols(i, j);
  }
  void swap_cols(int i, int j) {
    w.swap_cols(i, j);
    v.swap_cols(i, j);
  }
  // row i -= q * row t
  void sub_row(int i, int t, const Int& q) {
    w.add_row_multiple(i, t, -q);
    u.add_row_multiple(i, t, -q);
    u_inv.add_col_multiple(t, i, q);
  }
  // col j -= q * col t
  void sub_col(int j, int t, const Int& q) {
    w.add_col_multiple(j, t, -q);
    v.add_col_multiple(j, t, -q);
  }
  // row t += row i
  void add_row(int t, int i) {
    w.add_row_multiple(t, i, Int(1));
    u.add_row_multiple(t, i, Int(1));
    u_inv.add_col_multiple(i, t, Int(-1));
  }
  void negate_row(int i) {
    w.negate_row(i);
    u.negate_row(i);
    u_inv.negate_col(i);
  }
};

}  // namespace

SnfResult smith_normal_form(const IntMatrix& m) {
  if (m.empty()) throw std::invalid_argument("smith_normal_form: empty matrix");
  const int rows = m.rows(), cols = m.cols();
  Work wk{m, IntMatrix::identity(rows), IntMatrix::identity(rows), IntMatrix::identity(cols)};
  IntMatrix& w = wk.w;

  int t = 0;
  const int steps = std::min(rows, cols);
  while (t < steps) {
    // Smallest nonzero entry of the trailing block becomes the pivot.
    int pi = -1, pj = -1;
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        if (w.at(i, j) == 0) continue;
        if (pi < 0 || mpz_cmpabs(w.at(i, j).get_mpz_t(), w.at(pi, pj).get_mpz_t()) < 0) {
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // trailing block is zero
    wk.swap_rows(t, pi);
    wk.swap_cols(t, pj);
    if (w.at(t, t) < 0) wk.negate_row(t);

    bool settled = false;
    while (!settled) {
      settled = true;
      // Clear the pivot column. A nonzero remainder becomes the new,
      // strictly smaller pivot, so this terminates.
      for (int i = t + 1; i < rows; ++i) {
        if (w.at(i, t) == 0) continue;
        Int q = round_div(w.at(i, t), w.at(t, t));
        wk.sub_row(i, t, q);
        if (w.at(i, t) != 0) {
          wk.swap_rows(t, i);
          if (w.at(t, t) < 0) wk.negate_row(t);
          settled = false;
        }
      }
      if (!settled) continue;
      // Clear the pivot row (column operations leave the column intact).
      for (int j = t + 1; j < cols; ++j) {
        if (w.at(t, j) == 0) continue;
        Int q = round_div(w.at(t, j), w.at(t, t));
        wk.sub_col(j, t, q);
        if (w.at(t, j) != 0) {
          wk.swap_cols(t, j);
          if (w.at(t, t) < 0) wk.negate_row(t);
          settled = false;
        }
      }
      if (!settled) continue;
      // Divisibility: the pivot must divide the whole trailing block.
      for (int i = t + 1; i < rows && settled; ++i)
        for (int j = t + 1; j < cols && settled; ++j)
          if (!divides(w.at(t, t), w.at(i, j))) {
            wk.add_row(t, i);
            settled = false;
          }
    }
    if (w.at(t, t) < 0) wk.negate_row(t);
    ++t;
  }

  SnfResult r;
  r.u = std::move(wk.u);
  r.u_inv = std::move(wk.u_inv);
  r.v = std::move(wk.v);
  r.d = std::move(wk.w);
  for (int i = 0; i < steps; ++i)
    if (r.d.at(i, i) != 0) ++r.rank;
  return r;
}

std::vector<Int> SnfResult::diagonal() const {
  std::vector<Int> out;
  for (int i = 0; i < std::min(d.rows(), d.cols()); ++i) out.push_back(d.at(i, i));
  return out;
}

int lattice_rank(const IntMatrix& gens) {
  if (gens.empty()) return 0;
  bool all_zero = true;
  for (int i = 0; i < gens.rows() && all_zero; ++i)
    for (int j = 0; j < gens.cols() && all_zero; ++j)
      if (gens.at(i, j) != 0) all_zero = false;
  if (all_zero) return 0;
  return smith_normal_form(gens).rank;
}

QuotientDecomposition quotient_decomposition(int d, const IntMatrix& kernel_gens) {
  if (d <= 0) throw std::invalid_argument("quotient_decomposition: ambient rank must be positive");
  if (!kernel_gens.empty() && kernel_gens.rows() != d)
    throw std::invalid_argument("quotient_decomposition: kernel generators have wrong row count");

  QuotientDecomposition out;
  out.ambient_rank = d;

  if (kernel_gens.empty()) {
    out.kernel_basis = IntMatrix(d, 0);
    out.free_rank = d;
    out.free_lift_basis = IntMatrix::identity(d);
    return out;
  }

  SnfResult snf = smith_normal_form(kernel_gens);
  const int q = snf.rank;
  out.free_rank = d - q;

  // Basis of the kernel lattice itself: d_j * (column j of U^-1), j < q.
  out.kernel_basis = IntMatrix(d, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < d; ++i)
      out.kernel_basis.at(i, j) = snf.d.at(j, j) * snf.u_inv.at(i, j);

  for (int j = 0; j < q; ++j)
    if (snf.d.at(j, j) > 1) out.torsion_invariants.push_back(snf.d.at(j, j));

  // The remaining U^-1 columns carry the free quotient coordinates.
  std::vector<int> free_idx;
  for (int j = q; j < d; ++j) free_idx.push_back(j);
  out.free_lift_basis = snf.u_inv.columns(free_idx);
  return out;
}

LatticeMembership::LatticeMembership(const IntMatrix& basis) : rows_(basis.rows()) {
  if (!basis.empty()) snf_ = smith_normal_form(basis);
}

bool LatticeMembership::contains(const std::vector<Int>& vec) const {
  if (int(vec.size()) != rows_) throw std::invalid_argument("membership: bad vector length");
  if (snf_.d.empty()) {  // trivial lattice {0}
    for (const Int& x : vec)
      if (x != 0) return false;
    return true;
  }
  // B x = vec solvable over Z iff (U vec)_j is divisible by d_j for pivot
  // rows and zero beyond the rank.
  for (int i = 0; i < rows_; ++i) {
    Int w(0);
    for (int l = 0; l < rows_; ++l) w += snf_.u.at(i, l) * vec[l];
    if (i < snf_.rank) {
      if (!divides(snf_.d.at(i, i), w)) return false;
    } else {
      if (w != 0) return false;
    }
  }
  return true;
}

bool lattice_contains_all(const IntMatrix& basis, const IntMatrix& vectors) {
  LatticeMembership mem(basis);
  for (int j = 0; j < vectors.cols(); ++j)
    if (!mem.contains(vectors.column(j))) return false;
  return true;
}

bool lattice_equal(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows()) return false;
  return lattice_contains_all(a, b) && lattice_contains_all(b, a);
}

}  // namespace sfl
