#include "sfl/numbers.hpp"

#include <cmath>

namespace sfl {

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  Rat q(s);  // gmpxx throws std::invalid_argument on bad syntax
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

std::string rat_to_string(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

bool is_squarefree(long d) {
  if (d < 1) return false;
  for (long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

Quadratic::Quadratic(Rat a, Rat b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (d_ < 1) throw std::invalid_argument("field discriminant must be >= 1");
  if (d_ == 1) {  // sqrt(1) = 1: fold into the rational part
    a_ += b_;
    b_ = 0;
  }
  if (b_ == 0) d_ = 1;
}

long Quadratic::join_disc(const Quadratic& x, const Quadratic& y) {
  if (x.b_ == 0) return y.d_;
  if (y.b_ == 0) return x.d_;
  if (x.d_ != y.d_)
    throw std::invalid_argument("mixing quadratic numbers from different fields");
  return x.d_;
}

int Quadratic::sign() const {
  if (b_ == 0) return sgn(a_);
  if (a_ == 0) return sgn(b_);
  int sa = sgn(a_), sb = sgn(b_);
  if (sa == sb) return sa;
  // a and b*sqrt(D) compete: compare a^2 against b^2*D.
  Rat lhs = a_ * a_;
  Rat rhs = b_ * b_ * d_;
  int c = cmp(lhs, rhs);
  if (c == 0) return 0;  // only possible if sqrt(D) were rational
  return c > 0 ? sa : sb;
}

Quadratic Quadratic::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero quadratic number");
  // (a + b sqrt D)^-1 = (a - b sqrt D) / (a^2 - b^2 D)
  Rat n = a_ * a_ - b_ * b_ * d_;
  if (n == 0) throw std::domain_error("non-invertible quadratic number (D not squarefree?)");
  return Quadratic(a_ / n, -b_ / n, d_);
}

double Quadratic::to_double() const {
  double v = a_.get_d();
  if (b_ != 0) v += b_.get_d() * std::sqrt(static_cast<double>(d_));
  return v;
}

std::string Quadratic::str() const {
  if (b_ == 0) return rat_to_string(a_);
  std::string s = rat_to_string(a_);
  s += (b_ > 0) ? " + " : " - ";
  Rat babs = ::abs(b_);
  if (babs != 1) s += rat_to_string(babs) + "*";
  s += "sqrt(" + std::to_string(d_) + ")";
  return s;
}

Quadratic& Quadratic::operator+=(const Quadratic& o) {
  d_ = join_disc(*this, o);
  a_ += o.a_;
  b_ += o.b_;
  if (b_ == 0) d_ = 1;
  return *this;
}

Quadratic& Quadratic::operator-=(const Quadratic& o) {
  d_ = join_disc(*this, o);
  a_ -= o.a_;
  b_ -= o.b_;
  if (b_ == 0) d_ = 1;
  return *this;
}

Quadratic& Quadratic::operator*=(const Quadratic& o) {
  long d = join_disc(*this, o);
  Rat a = a_ * o.a_ + b_ * o.b_ * d;
  Rat b = a_ * o.b_ + b_ * o.a_;
  a_ = a;
  b_ = b;
  d_ = (b_ == 0) ? 1 : d;
  return *this;
}

Int quad_floor(const Quadratic& x) {
  if (x.is_rational()) return rat_floor(x.rational_part());
  Int f(std::floor(x.to_double()));
  // The double estimate can be off by an ulp; settle exactly.
  while (Quadratic(Rat(f)) > x) f -= 1;
  while (Quadratic(Rat(f + 1)) <= x) f += 1;
  return f;
}

}  // namespace sfl
