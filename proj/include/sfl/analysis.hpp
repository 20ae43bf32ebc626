#ifndef SFL_ANALYSIS_HPP
#define SFL_ANALYSIS_HPP

#include "sfl/simulate.hpp"

namespace sfl {

enum class Verdict { dissipative_consistent, conservative_consistent, inconclusive };
std::string verdict_name(Verdict v);

struct ScalingReport {
  double slope = 0;
  double stderr_slope = 0;
  double predicted = 0;                 // p / alpha
  std::vector<double> t_values;
  std::vector<double> medians;          // median of M_t per t
  std::vector<double> scaled_medians;   // median of t^-predicted M_t per t
  Verdict verdict = Verdict::inconclusive;
};

struct FrechetFit {
  double alpha = 0;
  double scale = 0;                     // K
  std::vector<double> t_values;
  std::vector<double> ks;               // KS distance per t
  bool pass = false;
};

// OLS of log(median M_t) on log t, with the verdict rules: slope within
// slope_tol of the prediction and scaled medians within a 3x band reads as
// dissipative-consistent; strictly decreasing scaled medians as
// conservative-consistent; anything else is inconclusive.
ScalingReport estimate_scaling_exponent(const MaximaDataset& ds, double predicted_exponent,
                                        double slope_tol = 0.15);

// Quantile of the Frechet law with CDF exp(-(z/K)^-alpha).
double frechet_quantile(double u, double alpha, double scale);
double frechet_cdf(double z, double alpha, double scale);

// Predicted limit scale K = C_alpha^{1/alpha} K_X for a dissipative
// single-box model; K_X comes from the closed-form growth of b(T).
double limit_scale_prediction(const FieldModel& model, const Classification& cls);

// One-sample KS test of t^-predicted M_t against Frechet(alpha, K) per t.
// Passes when the largest-t distance is below the threshold and the ladder
// shows no rise beyond rise_tol.
FrechetFit frechet_gof(const MaximaDataset& ds, double alpha, double scale,
                       double predicted_exponent, const Classification& cls,
                       double threshold = 0.15, double rise_tol = 0.05);

// Small statistics helpers shared with the test suites.
double median(std::vector<double> v);
double ks_statistic_to_cdf(std::vector<double> sample, double (*cdf)(double, double, double),
                           double alpha, double scale);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// The full verdict document as JSON text (deterministic field order).
std::string report_to_json(const ScalingReport& sr, const FrechetFit* fit,
                           const std::string& model_digest, double alpha, double k_scale,
                           double ks_threshold, double slope_tol);

}  // namespace sfl

#endif  // SFL_ANALYSIS_HPP
