#ifndef SFL_TEST_HELPERS_HPP
#define SFL_TEST_HELPERS_HPP

#include <cmath>
#include <random>

#include "sfl/analysis.hpp"
#include "sfl/covering.hpp"

namespace sfl_test {

using namespace sfl;

// Example model: d = 3, translation s -> s + x - y on R, rotation by z on the
// circle, unit box kernel.
inline FieldModel example3_model(double alpha = 1.5) {
  FieldModel m;
  m.spec.d = 3;
  m.spec.disc = 1;
  m.spec.gamma0 = QuadMatrix::identity(3);
  m.spec.translation = QuadMatrix(1, 3);
  m.spec.translation.at(0, 0) = Quadratic(1);
  m.spec.translation.at(0, 1) = Quadratic(-1);
  m.spec.rotation = RatMatrix(1, 3);
  m.spec.rotation.at(0, 2) = Rat(1);
  m.alpha = alpha;
  KernelBox box;
  box.weight = 1.0;
  box.lo = {Rat(0)};
  box.hi = {Rat(1)};
  m.kernel = {box};
  m.digest = "test-example3";
  return m;
}

// Irrational-step model: d = 2, s -> s + u - v sqrt(2) on R.
inline FieldModel nadkarni_model(double alpha = 1.5, bool alt_gamma0 = false) {
  FieldModel m;
  m.spec.d = 2;
  m.spec.disc = 2;
  m.spec.gamma0 = QuadMatrix::identity(2);
  if (alt_gamma0) m.spec.gamma0.at(0, 0) = Quadratic::sqrt_of(2);
  m.spec.translation = QuadMatrix(1, 2);
  m.spec.translation.at(0, 0) = Quadratic(1);
  m.spec.translation.at(0, 1) = Quadratic(Rat(0), Rat(-1), 2);
  m.alpha = alpha;
  KernelBox box;
  box.weight = 1.0;
  box.lo = {Rat(0)};
  box.hi = {Rat(1)};
  m.kernel = {box};
  m.digest = alt_gamma0 ? "test-nadkarni-alt" : "test-nadkarni";
  return m;
}

// Random rational action specs for the property suites: d <= 3, numerators
// bounded by 5, identity gamma0. Regenerates until the spec has p >= 1.
inline ActionSpec random_rational_spec(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick_d(1, 3), num(-5, 5), den(1, 3), pick_kr(0, 2);
  while (true) {
    ActionSpec spec;
    spec.d = pick_d(rng);
    spec.disc = 1;
    spec.gamma0 = QuadMatrix::identity(spec.d);
    int k = pick_kr(rng), r = pick_kr(rng);
    if (k + r == 0) k = 1;
    spec.translation = QuadMatrix(k, spec.d);
    for (auto& q : spec.translation.e) q = Quadratic(Rat(num(rng), den(rng)));
    spec.rotation = RatMatrix(r, spec.d);
    for (auto& q : spec.rotation.e) q = Rat(num(rng), den(rng));
    try {
      effective_dimension(spec, 0);
      return spec;  // p >= 1
    } catch (const std::domain_error&) {
      // pure torsion; draw again
    }
  }
}

// Oracle for C_alpha: numerical quadrature of the defining integral
// int_0^inf x^-alpha sin(x) dx. Head integral after x = u^2 smooths the
// origin; oscillating tail summed per half-period with repeated averaging.
inline double sin_integral_quadrature(double alpha) {
  auto simpson = [](auto f, double a, double b, int n) {
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  const double pi = 3.14159265358979323846;
  auto head_integrand = [alpha](double u) {
    if (u == 0.0) return 0.0;  // limit is 0 for alpha < 1.5, finite for 1.5
    return 2.0 * std::pow(u, 1.0 - 2.0 * alpha) * std::sin(u * u);
  };
  double head = simpson(head_integrand, 0.0, std::sqrt(pi), 4096);
  if (alpha >= 1.5) {
    // integrand tends to 2 at 0 when alpha = 1.5; fix the endpoint
    auto head2 = [alpha](double u) {
      double uu = std::max(u, 1e-12);
      return 2.0 * std::pow(uu, 1.0 - 2.0 * alpha) * std::sin(uu * uu);
    };
    head = simpson(head2, 1e-12, std::sqrt(pi), 4096);
  }
  // Tail: alternating half-period panels, then repeated averaging of the
  // partial sums to accelerate the alternating series.
  const int panels = 240;
  std::vector<double> partial;
  double acc = 0;
  for (int k = 1; k <= panels; ++k) {
    auto f = [alpha](double x) { return std::pow(x, -alpha) * std::sin(x); };
    acc += simpson(f, k * pi, (k + 1) * pi, 256);
    partial.push_back(acc);
  }
  std::vector<double> avg(partial.end() - 60, partial.end());
  for (int pass = 0; pass < 40; ++pass) {
    for (size_t i = 0; i + 1 < avg.size(); ++i) avg[i] = 0.5 * (avg[i] + avg[i + 1]);
    avg.pop_back();
  }
  return head + avg.front();
}

// Exhaustive per-point feasibility for the covering inclusion: enumerate all
// dyadic coefficient tuples and check the leftover y lands in the box.
inline bool covering_brute_force(long m_bound, const IntMatrix& u, const IntMatrix& v,
                                 long n, int level) {
  const int d = u.empty() ? v.rows() : u.rows();
  IntMatrix basis = u.empty() ? v : (v.empty() ? u : u.hcat(v));
  const long scale = 1L << level;
  const long gb = n * scale, yb = m_bound * scale, cb = m_bound * n * scale;

  std::vector<long> g(d, -gb), c(d);
  auto next = [](std::vector<long>& p, long bound) {
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] < bound) {
        ++p[i];
        for (size_t j = 0; j < i; ++j) p[j] = -bound;
        return true;
      }
    }
    return false;
  };
  do {
    bool ok = false;
    std::fill(c.begin(), c.end(), -cb);
    do {
      bool in = true;
      for (int i = 0; i < d && in; ++i) {
        long y = g[i];
        for (int j = 0; j < d; ++j) y -= long(basis.at(i, j).get_si()) * c[j];
        in = (y >= -yb && y <= yb);
      }
      if (in) {
        ok = true;
        break;
      }
    } while (next(c, cb));
    if (!ok) return false;
  } while (next(g, gb));
  return true;
}

}  // namespace sfl_test

#endif
