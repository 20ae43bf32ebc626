#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sfl/analysis.hpp"

using namespace sfl;
using sfl_test::example3_model;
using sfl_test::nadkarni_model;

namespace {

MaximaDataset synthetic_power_law(double exponent, double scale = 1.0) {
  MaximaDataset ds;
  ds.t_ladder = {8, 16, 32, 64};
  for (double t : ds.t_ladder)
    for (int rep = 0; rep < 60; ++rep)
      ds.rows.push_back(MaximaRow{t, rep, scale * std::pow(t, exponent), 0});
  return ds;
}

}  // namespace

TEST_CASE("exponent estimator is exact on a deterministic power law") {
  MaximaDataset ds = synthetic_power_law(0.7);
  ScalingReport r = estimate_scaling_exponent(ds, 0.7);
  CHECK(std::fabs(r.slope - 0.7) < 1e-12);
  CHECK(r.stderr_slope < 1e-12);
  CHECK(r.verdict == Verdict::dissipative_consistent);
}

TEST_CASE("exponent estimator is invariant under constant scaling") {
  ScalingReport a = estimate_scaling_exponent(synthetic_power_law(0.6), 0.6);
  ScalingReport b = estimate_scaling_exponent(synthetic_power_law(0.6, 37.5), 0.6);
  CHECK(std::fabs(a.slope - b.slope) < 1e-12);
}

TEST_CASE("verdict rules") {
  // scaled medians strictly decreasing and slope far from prediction
  MaximaDataset slow = synthetic_power_law(0.5);
  ScalingReport r = estimate_scaling_exponent(slow, 1.2);
  CHECK(r.verdict == Verdict::conservative_consistent);
  // slope matches but scaled medians blow past the 3x band: inconclusive
  MaximaDataset wild = synthetic_power_law(0.5);
  for (auto& row : wild.rows)
    if (row.t == 64) row.m_t *= 10;
  ScalingReport r2 = estimate_scaling_exponent(wild, 0.8);
  CHECK(r2.verdict == Verdict::inconclusive);
}

TEST_CASE("estimator input validation") {
  MaximaDataset ds = synthetic_power_law(0.7);
  MaximaDataset two;
  two.t_ladder = {8, 16};
  CHECK_THROWS_AS(estimate_scaling_exponent(two, 0.5), std::invalid_argument);
  MaximaDataset zeros = ds;
  for (auto& row : zeros.rows)
    if (row.t == 16) row.m_t = 0;
  CHECK_THROWS_AS(estimate_scaling_exponent(zeros, 0.5), std::invalid_argument);
}

TEST_CASE("frechet quantile closed form and inversion") {
  CHECK(frechet_quantile(std::exp(-1.0), 1.5, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frechet_quantile(0.5, 1.0, 1.0) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
  // quantile and cdf invert each other
  for (double u = 0.05; u < 1.0; u += 0.05) {
    double z = frechet_quantile(u, 1.5, 2.0);
    CHECK(std::fabs(frechet_cdf(z, 1.5, 2.0) - u) < 1e-12);
  }
  // monotone in u
  double prev = 0;
  for (double u = 0.1; u < 1.0; u += 0.1) {
    double z = frechet_quantile(u, 0.8, 1.0);
    CHECK(z > prev);
    prev = z;
  }
  CHECK_THROWS_AS(frechet_quantile(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("limit scale prediction") {
  FieldModel m = example3_model();
  Classification cls = classify(m.spec, m.alpha);
  double k = limit_scale_prediction(m, cls);
  double expected = std::pow(tail_constant(1.5), 2.0 / 3.0) * std::pow(4.0, 2.0 / 3.0);
  CHECK(k == doctest::Approx(expected).epsilon(1e-12));

  FieldModel m1 = example3_model(1.0);
  Classification cls1 = classify(m1.spec, m1.alpha);
  CHECK(limit_scale_prediction(m1, cls1) ==
        doctest::Approx(2.0 / 3.14159265358979323846 * 4.0).epsilon(1e-12));

  FieldModel nad = nadkarni_model();
  Classification ncls = classify(nad.spec, nad.alpha);
  CHECK_THROWS_AS(limit_scale_prediction(nad, ncls), std::domain_error);

  // homogeneity: scaling the kernel scales K linearly
  FieldModel scaled = example3_model();
  scaled.kernel[0].weight = 2.5;
  CHECK(limit_scale_prediction(scaled, cls) == doctest::Approx(2.5 * k).epsilon(1e-12));
}

TEST_CASE("frechet goodness of fit on synthetic draws") {
  const double alpha = 1.5, k = 2.0;
  MaximaDataset ds;
  ds.t_ladder = {64};
  Rng rng(314);
  for (int rep = 0; rep < 1000; ++rep) {
    double u = rng.uniform();
    // exact Frechet draw scaled back up by t^{p/alpha}
    double z = frechet_quantile(u, alpha, k) * std::pow(64.0, 1.0 / alpha);
    ds.rows.push_back(MaximaRow{64, rep, z, 0});
  }
  Classification cls;
  cls.conservative = false;
  FrechetFit fit = frechet_gof(ds, alpha, k, 1.0 / alpha, cls);
  CHECK(fit.ks[0] < 0.05);
  CHECK(fit.pass);
  // a misplaced scale is detected
  FrechetFit off = frechet_gof(ds, alpha, 2.0 * k, 1.0 / alpha, cls);
  CHECK(off.ks[0] > 0.2);
  CHECK_FALSE(off.pass);

  Classification cons;
  cons.conservative = true;
  CHECK_THROWS_AS(frechet_gof(ds, alpha, k, 1.0 / alpha, cons), std::domain_error);
}

TEST_CASE("report JSON carries the verdict fields") {
  MaximaDataset ds = synthetic_power_law(0.7);
  ScalingReport r = estimate_scaling_exponent(ds, 0.7);
  std::string doc = report_to_json(r, nullptr, "deadbeef00000000", 1.5, 0, 0.15, 0.15);
  CHECK(doc.find("\"slope\"") != std::string::npos);
  CHECK(doc.find("\"verdict\"") != std::string::npos);
  CHECK(doc.find("deadbeef00000000") != std::string::npos);
}
