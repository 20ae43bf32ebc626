#ifndef SFL_ACTION_HPP
#define SFL_ACTION_HPP

#include <string>
#include <vector>

#include "sfl/smith.hpp"

namespace sfl {

// A measure-preserving R^d action of translation + rotation type over one
// real quadratic field: the point t acts on R^k x (torus)^r by
//   s      |-> s + translation * t          (Lebesgue measure on R^k)
//   zeta_j |-> zeta_j * e^{2 pi i <rotation_j, t>}   (Haar on the torus)
// with index group Gamma_0 generated by the columns of gamma0 and dyadic
// refinements Gamma_i = 2^-i Gamma_0.
struct ActionSpec {
  int d = 0;                // index dimension
  long disc = 1;            // field discriminant D (squarefree, >= 1)
  QuadMatrix gamma0;        // d x d, columns generate Gamma_0
  QuadMatrix translation;   // k x d
  RatMatrix rotation;       // r x d, rational frequencies

  int k() const { return translation.rows; }
  int r() const { return rotation.rows; }

  // Throws std::invalid_argument when the invariants fail (rank-d gamma0,
  // squarefree D, at least one action coordinate).
  void validate() const;

  // translation * gamma0 and rotation * gamma0 in field arithmetic.
  QuadMatrix translation_gamma() const;
  QuadMatrix rotation_gamma() const;
};

// Generators of K_i = {u in Gamma_i : phi_u = id}, written in Gamma_i
// coordinates (u = 2^-i Gamma_0 n for integer vectors n).
struct KernelLattice {
  int level = 0;
  IntMatrix basis;  // d x q_i
};

KernelLattice kernel_lattice(const ActionSpec& spec, int level);

enum class LimitBranch { frechet, degenerate };

struct Classification {
  int p = 0;                          // group-theoretic dimension
  bool conservative = false;          // for the level-0 free lift
  double predicted_exponent = 0.0;    // p / alpha
  std::vector<std::vector<Int>> torsion_profile;  // invariant factors per level
  IntMatrix free_lift;                // level-0 free lift basis (d x p)
  LimitBranch branch = LimitBranch::frechet;
};

// p and the torsion profile from levels 0..i_max. Throws std::domain_error
// when p = 0 (the growth law needs p >= 1) and std::logic_error if levels
// disagree, which would indicate an arithmetic bug: the quotient ranks are
// provably level-independent.
Classification effective_dimension(const ActionSpec& spec, int i_max);

// Decides conservativity of the restricted action {phi_t : t in span(F)}.
// Dissipative iff the image group of the span in R^k x torus is discrete,
// i.e. the translation image map is injective on the span and the Z-rank of
// the image equals its real dimension. F columns are read in Gamma_i
// coordinates for any fixed i (the criterion is scale-invariant).
bool is_conservative(const ActionSpec& spec, const IntMatrix& f_basis);

// Full classification: dimension, conservativity of the computed free lift,
// predicted exponent p/alpha and the resulting limit branch.
Classification classify(const ActionSpec& spec, double alpha, int i_max = 3);

}  // namespace sfl

#endif  // SFL_ACTION_HPP
