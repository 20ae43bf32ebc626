#include "sfl/action.hpp"

#include <stdexcept>

namespace sfl {

void ActionSpec::validate() const {
  if (d < 1) throw std::invalid_argument("action spec: d must be >= 1");
  if (!is_squarefree(disc)) throw std::invalid_argument("action spec: D must be squarefree and >= 1");
  if (gamma0.rows != d || gamma0.cols != d)
    throw std::invalid_argument("action spec: gamma0 must be d x d");
  if (translation.rows > 0 && translation.cols != d)
    throw std::invalid_argument("action spec: translation must have d columns");
  if (rotation.rows > 0 && rotation.cols != d)
    throw std::invalid_argument("action spec: rotation must have d columns");
  if (k() + r() < 1) throw std::invalid_argument("action spec: need k + r >= 1");
  for (const Quadratic& q : gamma0.e)
    if (!q.is_rational() && q.disc() != disc)
      throw std::invalid_argument("action spec: gamma0 entry from a different field");
  for (const Quadratic& q : translation.e)
    if (!q.is_rational() && q.disc() != disc)
      throw std::invalid_argument("action spec: translation entry from a different field");
  if (field_rank(gamma0) != d)
    throw std::invalid_argument("action spec: gamma0 is not invertible over the field");
}

QuadMatrix ActionSpec::translation_gamma() const {
  if (translation.rows == 0) return QuadMatrix(0, d);
  return translation * gamma0;
}

QuadMatrix ActionSpec::rotation_gamma() const {
  if (rotation.rows == 0) return QuadMatrix(0, d);
  QuadMatrix c(rotation.rows, rotation.cols);
  for (int i = 0; i < rotation.rows; ++i)
    for (int j = 0; j < rotation.cols; ++j) c.at(i, j) = Quadratic(rotation.at(i, j));
  return c * gamma0;
}

namespace {

// Integer kernel basis of a rational matrix: {n in Z^d : m n = 0}, returned
// as the columns of a d x s matrix. The kernel of a map into a torsion-free
// group is automatically saturated.
IntMatrix integer_kernel(const RatMatrix& m, int d) {
  if (m.rows == 0) return IntMatrix::identity(d);
  IntMatrix w = integerize_rows(m);
  bool all_zero = true;
  for (int i = 0; i < w.rows() && all_zero; ++i)
    for (int j = 0; j < w.cols() && all_zero; ++j)
      if (w.at(i, j) != 0) all_zero = false;
  if (all_zero) return IntMatrix::identity(d);
  SnfResult snf = smith_normal_form(w);
  std::vector<int> free_idx;
  for (int j = snf.rank; j < d; ++j) free_idx.push_back(j);
  return snf.v.columns(free_idx);
}

}  // namespace

KernelLattice kernel_lattice(const ActionSpec& spec, int level) {
  if (level < 0) throw std::invalid_argument("kernel_lattice: level must be >= 0");
  spec.validate();
  const int d = spec.d;

  QuadMatrix ag = spec.translation_gamma();  // k x d
  QuadMatrix cg = spec.rotation_gamma();     // r x d

  // Linear constraints: both components of A*Gamma0*n vanish, and the surd
  // component of C*Gamma0*n vanishes (an integer torus frequency is rational).
  RatMatrix lin(2 * ag.rows + cg.rows, d);
  for (int i = 0; i < ag.rows; ++i)
    for (int j = 0; j < d; ++j) {
      lin.at(i, j) = ag.at(i, j).rational_part();
      lin.at(ag.rows + i, j) = ag.at(i, j).surd_part();
    }
  for (int i = 0; i < cg.rows; ++i)
    for (int j = 0; j < d; ++j) lin.at(2 * ag.rows + i, j) = cg.at(i, j).surd_part();

  IntMatrix l = integer_kernel(lin, d);  // d x s
  const int s = l.cols();
  KernelLattice out;
  out.level = level;
  if (s == 0 || cg.rows == 0) {
    out.basis = l;
    return out;
  }

  // Congruence: rational part of C*Gamma0*(L x) must lie in 2^level Z^r.
  RatMatrix q(cg.rows, s);
  for (int i = 0; i < cg.rows; ++i)
    for (int j = 0; j < s; ++j) {
      Rat acc(0);
      for (int t = 0; t < d; ++t)
        acc += cg.at(i, t).rational_part() * Rat(l.at(t, j));
      q.at(i, j) = acc;
    }
  Int den(1);
  for (const Rat& x : q.e) den = lcm(den, x.get_den());
  IntMatrix g(cg.rows, s);
  for (int i = 0; i < cg.rows; ++i)
    for (int j = 0; j < s; ++j) {
      Rat v = q.at(i, j) * Rat(den);
      v.canonicalize();
      g.at(i, j) = v.get_num();
    }
  Int modulus = pow2(static_cast<unsigned long>(level)) * den;
  if (modulus == 1) {
    out.basis = l;
    return out;
  }

  // G x = 0 (mod N) via SNF: with y = V^-1 x the conditions decouple to
  // y_j in (N / gcd(d_j, N)) Z, so x ranges over V * diag(N / gcd(d_j, N)).
  SnfResult snf = smith_normal_form(g);
  IntMatrix xbasis = snf.v;
  for (int j = 0; j < s; ++j) {
    Int dj = (j < std::min(g.rows(), g.cols())) ? snf.d.at(j, j) : Int(0);
    Int mult = modulus / gcd(dj, modulus);
    for (int i = 0; i < s; ++i) xbasis.at(i, j) *= mult;
  }
  out.basis = l * xbasis;
  return out;
}

Classification effective_dimension(const ActionSpec& spec, int i_max) {
  if (i_max < 0) throw std::invalid_argument("effective_dimension: i_max must be >= 0");
  spec.validate();
  Classification cls;
  int p = -1;
  for (int i = 0; i <= i_max; ++i) {
    KernelLattice k = kernel_lattice(spec, i);
    QuotientDecomposition qd = quotient_decomposition(spec.d, k.basis);
    if (p < 0) {
      p = qd.free_rank;
      cls.free_lift = qd.free_lift_basis;
    } else if (qd.free_rank != p) {
      throw std::logic_error("effective_dimension: free rank differs across levels (arithmetic bug)");
    }
    cls.torsion_profile.push_back(qd.torsion_invariants);
  }
  if (p == 0)
    throw std::domain_error(
        "group-theoretic dimension p = 0: the quotient is pure torsion and the "
        "maxima growth analysis assumes p >= 1");
  cls.p = p;
  return cls;
}

bool is_conservative(const ActionSpec& spec, const IntMatrix& f_basis) {
  spec.validate();
  if (f_basis.rows() != spec.d)
    throw std::invalid_argument("is_conservative: basis must have d rows");
  if (f_basis.cols() == 0)
    throw std::invalid_argument("is_conservative: empty free basis");

  IntMatrix k0 = kernel_lattice(spec, 0).basis;
  int rank_f = lattice_rank(f_basis);
  int rank_k = lattice_rank(k0);
  int rank_joint = k0.empty() ? rank_f : lattice_rank(f_basis.hcat(k0));
  if (rank_joint < rank_f + rank_k)
    throw std::invalid_argument("is_conservative: basis meets the kernel lattice nontrivially");

  // Image of the span under the translation part.
  QuadMatrix w = spec.translation_gamma() * f_basis;  // k x f
  int z_rank = rat_rank(split_components(w));
  int real_rank = field_rank(w);
  bool injective = (z_rank == rank_f);
  bool discrete = injective && (z_rank == real_rank);
  return !discrete;
}

Classification classify(const ActionSpec& spec, double alpha, int i_max) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("classify: alpha must lie in (0, 2)");
  Classification cls = effective_dimension(spec, i_max);
  cls.conservative = is_conservative(spec, cls.free_lift);
  cls.predicted_exponent = double(cls.p) / alpha;
  cls.branch = cls.conservative ? LimitBranch::degenerate : LimitBranch::frechet;
  return cls;
}

}  // namespace sfl
