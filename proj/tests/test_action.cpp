#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "sfl/action.hpp"
#include "sfl/model_io.hpp"

using namespace sfl;
using sfl_test::example3_model;
using sfl_test::nadkarni_model;
using sfl_test::random_rational_spec;

TEST_CASE("kernel lattice of the translation+rotation example") {
  ActionSpec spec = example3_model().spec;

  KernelLattice k0 = kernel_lattice(spec, 0);
  IntMatrix expected0 = IntMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
  CHECK(lattice_equal(k0.basis, expected0));

  KernelLattice k2 = kernel_lattice(spec, 2);
  IntMatrix expected2 = IntMatrix::from_rows({{1, 0}, {1, 0}, {0, 4}});
  CHECK(lattice_equal(k2.basis, expected2));
}

TEST_CASE("kernel lattice of the irrational-step action is trivial") {
  ActionSpec spec = nadkarni_model().spec;
  for (int i : {0, 1, 3}) CHECK(kernel_lattice(spec, i).basis.cols() == 0);
}

TEST_CASE("kernel nesting 2 K_{i+1} within K_i within K_{i+1}") {
  ActionSpec spec = example3_model().spec;
  for (int i = 0; i < 3; ++i) {
    IntMatrix ki = kernel_lattice(spec, i).basis;
    IntMatrix kip = kernel_lattice(spec, i + 1).basis;
    // In Gamma_{i+1} coordinates, K_i is 2 * basis_i; 2 K_{i+1} reads back in
    // Gamma_i coordinates as the columns of basis_{i+1} themselves.
    CHECK(lattice_contains_all(kip, ki * Int(2)));   // K_i subset of K_{i+1}
    CHECK(lattice_contains_all(ki, kip));            // 2 K_{i+1} subset of K_i
  }
}

TEST_CASE("effective dimension and torsion profile") {
  Classification cls = effective_dimension(example3_model().spec, 3);
  CHECK(cls.p == 1);
  REQUIRE(cls.torsion_profile.size() == 4);
  CHECK(cls.torsion_profile[0].empty());
  CHECK(cls.torsion_profile[1] == std::vector<Int>{Int(2)});
  CHECK(cls.torsion_profile[2] == std::vector<Int>{Int(4)});
  CHECK(cls.torsion_profile[3] == std::vector<Int>{Int(8)});
}

TEST_CASE("effective dimension depends on the generating lattice") {
  CHECK(effective_dimension(nadkarni_model().spec, 3).p == 2);
  CHECK(effective_dimension(nadkarni_model(1.5, true).spec, 3).p == 1);
}

TEST_CASE("pure-torsion actions are rejected with p = 0") {
  ActionSpec spec;
  spec.d = 1;
  spec.disc = 1;
  spec.gamma0 = QuadMatrix::identity(1);
  spec.rotation = RatMatrix(1, 1);
  spec.rotation.at(0, 0) = Rat(1, 2);  // order-2 rotation only
  CHECK_THROWS_AS(effective_dimension(spec, 2), std::domain_error);
  CHECK_THROWS_AS(classify(spec, 1.5), std::domain_error);
}

TEST_CASE("conservativity of the three bundled actions") {
  ActionSpec ex3 = example3_model().spec;
  IntMatrix f_ex3 = IntMatrix::from_rows({{1}, {0}, {0}});
  CHECK_FALSE(is_conservative(ex3, f_ex3));  // discrete image Z

  ActionSpec nad = nadkarni_model().spec;
  IntMatrix f_nad = IntMatrix::identity(2);
  CHECK(is_conservative(nad, f_nad));  // dense image Z + sqrt(2) Z

  ActionSpec nad_alt = nadkarni_model(1.5, true).spec;
  IntMatrix f_alt = IntMatrix::from_rows({{1}, {0}});  // steps of sqrt(2)
  CHECK_FALSE(is_conservative(nad_alt, f_alt));  // discrete image sqrt(2) Z
}

TEST_CASE("is_conservative rejects bases meeting the kernel") {
  ActionSpec ex3 = example3_model().spec;
  IntMatrix bad = IntMatrix::from_rows({{1, 0}, {1, 0}, {0, 1}});
  CHECK_THROWS_AS(is_conservative(ex3, bad), std::invalid_argument);
}

TEST_CASE("classify combines dimension, conservativity and the exponent") {
  Classification c1 = classify(example3_model().spec, 1.5);
  CHECK(c1.p == 1);
  CHECK_FALSE(c1.conservative);
  CHECK(c1.branch == LimitBranch::frechet);
  CHECK(c1.predicted_exponent == doctest::Approx(1.0 / 1.5).epsilon(1e-12));

  Classification c2 = classify(nadkarni_model().spec, 1.5);
  CHECK(c2.p == 2);
  CHECK(c2.conservative);
  CHECK(c2.branch == LimitBranch::degenerate);
  CHECK(c2.predicted_exponent == doctest::Approx(2.0 / 1.5).epsilon(1e-12));

  Classification c3 = classify(nadkarni_model(1.5, true).spec, 1.5);
  CHECK(c3.p == 1);
  CHECK_FALSE(c3.conservative);

  // identity action has p = 0 and is rejected upstream
  ActionSpec idle;
  idle.d = 2;
  idle.disc = 1;
  idle.gamma0 = QuadMatrix::identity(2);
  idle.translation = QuadMatrix(1, 2);  // zero translation row
  CHECK_THROWS_AS(classify(idle, 1.5), std::domain_error);

  CHECK_THROWS_AS(classify(example3_model().spec, 2.5), std::invalid_argument);
}

TEST_CASE("invalid specs are rejected") {
  ActionSpec spec = example3_model().spec;
  spec.disc = 12;  // not squarefree
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  ActionSpec sing = example3_model().spec;
  sing.gamma0.at(0, 0) = Quadratic(0);
  sing.gamma0.at(0, 1) = Quadratic(0);
  sing.gamma0.at(0, 2) = Quadratic(0);
  CHECK_THROWS_AS(kernel_lattice(sing, 0), std::invalid_argument);
}

TEST_CASE("rank invariance across refinement levels on random specs") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 15; ++it) {
    ActionSpec spec = random_rational_spec(rng);
    Classification cls = effective_dimension(spec, 3);
    CHECK(cls.p >= 1);
    // p + q = d at every level
    for (int i = 0; i <= 3; ++i) {
      IntMatrix k = kernel_lattice(spec, i).basis;
      CHECK(cls.p + lattice_rank(k) == spec.d);
    }
  }
}

TEST_CASE("kernel nesting holds on random specs") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 15; ++it) {
    ActionSpec spec = random_rational_spec(rng);
    for (int i = 0; i < 3; ++i) {
      IntMatrix ki = kernel_lattice(spec, i).basis;
      IntMatrix kip = kernel_lattice(spec, i + 1).basis;
      if (ki.empty() || kip.empty()) {
        CHECK(ki.cols() == kip.cols());  // ranks agree, so both are trivial
        continue;
      }
      CHECK(lattice_contains_all(kip, ki * Int(2)));
      CHECK(lattice_contains_all(ki, kip));
    }
  }
}

TEST_CASE("conservativity is invariant under scaling and refinement of the lift") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 15; ++it) {
    ActionSpec spec = random_rational_spec(rng);
    bool verdict = false;
    bool first = true;
    for (int i = 0; i <= 3; ++i) {
      QuotientDecomposition qd =
          quotient_decomposition(spec.d, kernel_lattice(spec, i).basis);
      bool v = is_conservative(spec, qd.free_lift_basis);
      if (first) {
        verdict = v;
        first = false;
      } else {
        CHECK(v == verdict);
      }
      for (long r : {2L, 3L, 5L})
        CHECK(is_conservative(spec, qd.free_lift_basis * Int(r)) == verdict);
    }
  }
}

TEST_CASE("classification is a lattice invariant, not a basis artifact") {
  // [[1,1],[0,1]] generates the same index group as the identity
  FieldModel plain = nadkarni_model();
  FieldModel skew = nadkarni_model();
  skew.spec.gamma0.at(0, 1) = Quadratic(1);
  Classification a = classify(plain.spec, 1.5);
  Classification b = classify(skew.spec, 1.5);
  CHECK(a.p == b.p);
  CHECK(a.conservative == b.conservative);
  for (size_t i = 0; i < a.torsion_profile.size(); ++i)
    CHECK(a.torsion_profile[i] == b.torsion_profile[i]);
}

TEST_CASE("model JSON round trip preserves the classification") {
  for (const FieldModel& m :
       {example3_model(), nadkarni_model(), nadkarni_model(1.5, true)}) {
    std::string text = model_to_json(m);
    FieldModel back = parse_model(text);
    CHECK(back.spec.d == m.spec.d);
    CHECK(back.spec.disc == m.spec.disc);
    CHECK(back.alpha == m.alpha);
    CHECK(back.kernel.size() == m.kernel.size());
    Classification a = classify(m.spec, m.alpha);
    Classification b = classify(back.spec, back.alpha);
    CHECK(a.p == b.p);
    CHECK(a.conservative == b.conservative);
  }
}

TEST_CASE("malformed model documents carry line/column context") {
  try {
    parse_model("{\n  \"d\": 3,\n  broken\n}");
    FAIL("expected ModelFormatError");
  } catch (const ModelFormatError& e) {
    std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model("{\"d\": 3, \"D\": 4}"), ModelFormatError);
}
