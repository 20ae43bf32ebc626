#ifndef SFL_SMITH_HPP
#define SFL_SMITH_HPP

#include <vector>

#include "sfl/matrix.hpp"

namespace sfl {

// Smith normal form U*M*V = D with U, V unimodular and D diagonal with a
// divisibility chain d_1 | d_2 | ... | d_r, nonnegative, zeros at the tail.
// u_inv is maintained alongside so callers get the basis change of Z^rows
// without inverting U.
struct SnfResult {
  IntMatrix u;      // rows x rows, unimodular
  IntMatrix d;      // rows x cols, diagonal
  IntMatrix v;      // cols x cols, unimodular
  IntMatrix u_inv;  // exact inverse of u
  int rank = 0;     // number of nonzero diagonal entries

  std::vector<Int> diagonal() const;
};

SnfResult smith_normal_form(const IntMatrix& m);

// Rank of the lattice generated by the columns of gens (= number of nonzero
// invariant factors).
int lattice_rank(const IntMatrix& gens);

// Decomposition of Z^d / (column lattice of kernel_gens) into a free part of
// rank p and a finite part with the given invariant factors (> 1 only).
// free_lift_basis columns map isomorphically onto the free part; they are the
// basis vectors of the SNF change of coordinates that carry the free
// quotient coordinates, so projecting a lift column to the quotient and
// lifting back lands in the same coset.
struct QuotientDecomposition {
  int ambient_rank = 0;             // d
  IntMatrix kernel_basis;           // d x q, q = rank of the kernel lattice
  int free_rank = 0;                // p = d - q
  std::vector<Int> torsion_invariants;
  IntMatrix free_lift_basis;        // d x p
};

QuotientDecomposition quotient_decomposition(int d, const IntMatrix& kernel_gens);

// Membership and comparison of column lattices. A LatticeMembership caches
// the SNF of a generator matrix so repeated membership tests are cheap.
class LatticeMembership {
 public:
  explicit LatticeMembership(const IntMatrix& basis);
  bool contains(const std::vector<Int>& vec) const;

 private:
  int rows_;
  SnfResult snf_;
};

bool lattice_contains_all(const IntMatrix& basis, const IntMatrix& vectors);
bool lattice_equal(const IntMatrix& a, const IntMatrix& b);

}  // namespace sfl

#endif  // SFL_SMITH_HPP
