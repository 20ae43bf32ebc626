#include "sfl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace sfl {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::dissipative_consistent: return "dissipative-consistent";
    case Verdict::conservative_consistent: return "conservative-consistent";
    default: return "inconclusive";
  }
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ScalingReport estimate_scaling_exponent(const MaximaDataset& ds, double predicted_exponent,
                                        double slope_tol) {
  if (ds.t_ladder.size() < 3)
    throw std::invalid_argument("scaling estimate needs at least 3 distinct t values");
  ScalingReport rep;
  rep.predicted = predicted_exponent;
  rep.t_values = ds.t_ladder;
  for (double t : ds.t_ladder) {
    std::vector<double> vals = ds.values_for(t);
    if (int(vals.size()) < 50)
      throw std::invalid_argument("scaling estimate needs at least 50 replications per t");
    bool all_zero = true;
    for (double v : vals)
      if (v != 0) { all_zero = false; break; }
    if (all_zero) throw std::invalid_argument("degenerate dataset: all maxima are zero at some t");
    double m = median(vals);
    rep.medians.push_back(m);
    rep.scaled_medians.push_back(std::pow(t, -predicted_exponent) * m);
  }

  const size_t n = ds.t_ladder.size();
  double mx = 0, my = 0;
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = std::log(ds.t_ladder[i]);
    ys[i] = std::log(rep.medians[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  rep.slope = sxy / sxx;
  double intercept = my - rep.slope * mx;
  double rss = 0;
  for (size_t i = 0; i < n; ++i) {
    double e = ys[i] - intercept - rep.slope * xs[i];
    rss += e * e;
  }
  rep.stderr_slope = (n > 2) ? std::sqrt(rss / double(n - 2) / sxx) : 0.0;

  double lo = rep.scaled_medians[0], hi = rep.scaled_medians[0];
  bool decreasing = true;
  for (size_t i = 0; i < n; ++i) {
    lo = std::min(lo, rep.scaled_medians[i]);
    hi = std::max(hi, rep.scaled_medians[i]);
    if (i > 0 && !(rep.scaled_medians[i] < rep.scaled_medians[i - 1])) decreasing = false;
  }
  if (std::fabs(rep.slope - predicted_exponent) <= slope_tol && lo > 0 && hi / lo < 3.0)
    rep.verdict = Verdict::dissipative_consistent;
  else if (decreasing)
    rep.verdict = Verdict::conservative_consistent;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

double frechet_quantile(double u, double alpha, double scale) {
  if (!(u > 0 && u < 1)) throw std::invalid_argument("frechet_quantile: u must lie in (0,1)");
  if (!(scale > 0)) throw std::invalid_argument("frechet_quantile: scale must be positive");
  return scale * std::pow(-std::log(u), -1.0 / alpha);
}

double frechet_cdf(double z, double alpha, double scale) {
  if (z <= 0) return 0.0;
  return std::exp(-std::pow(z / scale, -alpha));
}

double limit_scale_prediction(const FieldModel& model, const Classification& cls) {
  if (cls.conservative)
    throw std::domain_error("limit scale is zero for a conservative model (K_X = 0)");
  if (model.spec.k() != 1 || model.kernel.size() != 1)
    throw std::invalid_argument("limit scale prediction needs a single box and k = 1");
  if (cls.p != 1)
    throw std::logic_error("dissipative single-box k=1 model must have p = 1");
  const double alpha = model.alpha;
  // b(T)^alpha = |w|^alpha (len + 2 T S), so T^-p b(T)^alpha -> |w|^alpha 2 S.
  double s1 = translate_width(model).to_double();
  double kx = std::fabs(model.kernel[0].weight) * std::pow(2.0 * s1, 1.0 / alpha);
  return std::pow(tail_constant(alpha), 1.0 / alpha) * kx;
}

double ks_statistic_to_cdf(std::vector<double> sample, double (*cdf)(double, double, double),
                           double alpha, double scale) {
  if (sample.empty()) throw std::invalid_argument("KS: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0;
  for (size_t i = 0; i < sample.size(); ++i) {
    double f = cdf(sample[i], alpha, scale);
    d = std::max(d, std::fabs(double(i + 1) / n - f));
    d = std::max(d, std::fabs(double(i) / n - f));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

FrechetFit frechet_gof(const MaximaDataset& ds, double alpha, double scale,
                       double predicted_exponent, const Classification& cls,
                       double threshold, double rise_tol) {
  if (cls.conservative)
    throw std::domain_error("Frechet fit applies to dissipative models only");
  FrechetFit fit;
  fit.alpha = alpha;
  fit.scale = scale;
  fit.t_values = ds.t_ladder;
  for (double t : ds.t_ladder) {
    std::vector<double> vals = ds.values_for(t);
    if (int(vals.size()) < 100)
      throw std::invalid_argument("Frechet fit needs at least 100 replications per t");
    for (double& v : vals) v *= std::pow(t, -predicted_exponent);
    fit.ks.push_back(ks_statistic_to_cdf(std::move(vals), frechet_cdf, alpha, scale));
  }
  bool no_rise = true;
  for (size_t i = 1; i < fit.ks.size(); ++i)
    if (fit.ks[i] > fit.ks[i - 1] + rise_tol) no_rise = false;
  fit.pass = (fit.ks.back() < threshold) && no_rise;
  return fit;
}

std::string report_to_json(const ScalingReport& sr, const FrechetFit* fit,
                           const std::string& model_digest, double alpha, double k_scale,
                           double ks_threshold, double slope_tol) {
  nlohmann::ordered_json j;
  j["model_digest"] = model_digest;
  j["slope"] = sr.slope;
  j["stderr"] = sr.stderr_slope;
  j["predicted"] = sr.predicted;
  j["verdict"] = verdict_name(sr.verdict);
  j["alpha"] = alpha;
  nlohmann::ordered_json med, scaled;
  for (size_t i = 0; i < sr.t_values.size(); ++i) {
    std::string key = std::to_string(sr.t_values[i]);
    med[key] = sr.medians[i];
    scaled[key] = sr.scaled_medians[i];
  }
  j["median_by_t"] = med;
  j["scaled_median_by_t"] = scaled;
  if (fit) {
    j["K"] = k_scale;
    nlohmann::ordered_json ks;
    for (size_t i = 0; i < fit->t_values.size(); ++i)
      ks[std::to_string(fit->t_values[i])] = fit->ks[i];
    j["ks_by_t"] = ks;
    j["ks_pass"] = fit->pass;
  }
  j["ks_threshold"] = ks_threshold;
  j["slope_tol"] = slope_tol;
  j["note"] = "tolerances are finite-sample engineering choices; override via CLI flags";
  return j.dump(2);
}

}  // namespace sfl
