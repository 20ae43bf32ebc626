#ifndef SFL_NUMBERS_HPP
#define SFL_NUMBERS_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfl {

// Exact integers and rationals. GMP supplies the arithmetic; everything in
// the lattice layer is built on these, never on floating point.
using Int = mpz_class;
using Rat = mpq_class;

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline Int pow2(unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

// Floor division quotient (rounds toward -infinity).
inline Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Quotient rounded to the nearest integer; used to keep Smith pivots small.
// The floor remainder carries the divisor's sign, so compare magnitudes.
inline Int round_div(const Int& a, const Int& b) {
  Int q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  Int rabs = abs(r);
  Int babs = abs(b);
  if (2 * rabs >= babs) q += 1;
  return q;
}

inline bool divides(const Int& d, const Int& a) {
  if (d == 0) return a == 0;
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

inline bool fits_long(const Int& a) { return a.fits_slong_p() != 0; }

// Parses "p/q" or "p". Throws std::invalid_argument on malformed input.
Rat rat_from_string(const std::string& s);

// "p/q", or "p" when the denominator is 1.
std::string rat_to_string(const Rat& q);

// Exact conversion; every double is a dyadic rational.
inline Rat rat_from_double(double x) { return Rat(x); }

inline Int rat_floor(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

bool is_squarefree(long d);

// An element a + b*sqrt(D) of the real quadratic field Q(sqrt(D)), with
// a, b exact rationals and D a squarefree positive integer shared across a
// computation. D == 1 means "plain rational" and forces b == 0; arithmetic
// between values with different nontrivial discriminants is rejected.
class Quadratic {
 public:
  Quadratic() : a_(0), b_(0), d_(1) {}
  Quadratic(long v) : a_(v), b_(0), d_(1) {}  // NOLINT(google-explicit-constructor)
  Quadratic(const Rat& a) : a_(a), b_(0), d_(1) {}  // NOLINT
  Quadratic(Rat a, Rat b, long d);

  static Quadratic sqrt_of(long d) { return Quadratic(Rat(0), Rat(1), d); }

  const Rat& rational_part() const { return a_; }
  const Rat& surd_part() const { return b_; }
  long disc() const { return d_; }
  bool is_rational() const { return b_ == 0; }
  bool is_zero() const { return a_ == 0 && b_ == 0; }

  int sign() const;
  Quadratic abs() const { return sign() < 0 ? -*this : *this; }
  Quadratic inverse() const;
  double to_double() const;
  std::string str() const;

  Quadratic operator-() const { return Quadratic(-a_, -b_, d_); }
  Quadratic& operator+=(const Quadratic& o);
  Quadratic& operator-=(const Quadratic& o);
  Quadratic& operator*=(const Quadratic& o);
  Quadratic& operator/=(const Quadratic& o) { return *this *= o.inverse(); }

  friend Quadratic operator+(Quadratic x, const Quadratic& y) { return x += y; }
  friend Quadratic operator-(Quadratic x, const Quadratic& y) { return x -= y; }
  friend Quadratic operator*(Quadratic x, const Quadratic& y) { return x *= y; }
  friend Quadratic operator/(Quadratic x, const Quadratic& y) { return x /= y; }
  friend bool operator==(const Quadratic& x, const Quadratic& y) {
    return (x - y).is_zero();
  }
  friend bool operator!=(const Quadratic& x, const Quadratic& y) {
    return !(x == y);
  }
  friend bool operator<(const Quadratic& x, const Quadratic& y) {
    return (x - y).sign() < 0;
  }
  friend bool operator<=(const Quadratic& x, const Quadratic& y) {
    return (x - y).sign() <= 0;
  }
  friend bool operator>(const Quadratic& x, const Quadratic& y) { return y < x; }
  friend bool operator>=(const Quadratic& x, const Quadratic& y) { return y <= x; }

 private:
  // Discriminant shared by two operands, or throw.
  static long join_disc(const Quadratic& x, const Quadratic& y);

  Rat a_, b_;
  long d_;
};

// Largest integer <= x, decided exactly.
Int quad_floor(const Quadratic& x);

}  // namespace sfl

#endif  // SFL_NUMBERS_HPP
