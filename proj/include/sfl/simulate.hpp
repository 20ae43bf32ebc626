#ifndef SFL_SIMULATE_HPP
#define SFL_SIMULATE_HPP

#include <iosfwd>
#include <optional>

#include "sfl/model_io.hpp"
#include "sfl/stable.hpp"

namespace sfl {

struct GridSpec {
  std::vector<double> t_ladder;  // positive, strictly increasing
  int level = 0;                 // skeleton level n: grid = Gamma_n within the window
  int replications = 1;
  uint64_t seed = 0;
  void validate() const;
};

enum class SimMethod { cell, series };
std::string method_name(SimMethod m);
SimMethod method_from_name(const std::string& s);

// Thrown when a request would exceed the configured point budget.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr uint64_t kDefaultPointBudget = 4'000'000;

// STABLE_FIELD_LAB_BUDGET overrides the default grid-point guard.
uint64_t point_budget_from_env(uint64_t fallback = kDefaultPointBudget);

// The field value at a grid point s depends on s only through the translate
// A*Gamma0*s, because the kernel is constant on the torus factor. The
// simulator therefore works on the set of distinct translates of a window,
// each with the smallest window radius that reaches it.
struct TranslateSet {
  int k = 0;
  int level = 0;
  long disc = 1;
  double key_denom = 1.0;               // shift = key / key_denom
  size_t count = 0;
  std::vector<long long> keys;          // 2k integers per translate (rat, surd parts)
  std::vector<double> shift;            // k doubles per translate
  std::vector<double> radius;           // min L-inf window radius
  // Ascending by shift (lexicographic for k > 1).
};

TranslateSet enumerate_translates(const FieldModel& model, double t_max, int level,
                                  uint64_t budget);

struct FieldSample {
  SimMethod method = SimMethod::cell;
  uint64_t seed = 0;
  int level = 0;
  std::vector<std::vector<long long>> points;  // Gamma_level coordinates
  std::vector<double> values;
  double value_at(const std::vector<long long>& coord) const;
};

FieldSample simulate_field(const FieldModel& model, double t, int level,
                           SimMethod method, uint64_t seed,
                           uint64_t budget = kDefaultPointBudget);

struct MaximaRow {
  double t = 0;
  int replication = 0;
  double m_t = 0;
  uint64_t seed = 0;  // substream seed of the replication
};

struct MaximaDataset {
  std::vector<double> t_ladder;
  int level = 0;
  SimMethod method = SimMethod::cell;
  std::string model_digest;
  uint64_t master_seed = 0;
  std::vector<MaximaRow> rows;  // ordered by (t index, replication)

  std::vector<double> values_for(double t) const;
  int replications() const;
};

// One field realization per replication, shared across the nested windows of
// the t ladder; replications run on independent substreams.
MaximaDataset partial_maxima(const FieldModel& model, const GridSpec& grid,
                             SimMethod method,
                             uint64_t budget = kDefaultPointBudget);

// Exact b(T)^alpha for a single unit-weight box with one translation
// coordinate: box length plus twice the maximal translate reach over the
// window [-T1, T1]. The dyadic grid is dense in the window, so the supremum
// over it equals the supremum over the continuum for indicator kernels.
Quadratic bt_exact_alpha_power(const FieldModel& model, const Rat& T);

// b(T) for a single-box k=1 kernel of any weight.
double bT_exact_indicator(const FieldModel& model, double T);

// Riemann-sum b(T) over the skeleton Gamma_level within [-T1, T1];
// nondecreasing in both the skeleton level and T.
double bT_numeric(const FieldModel& model, double T, double mesh, int level,
                  uint64_t budget = kDefaultPointBudget);

// Exact half-width sum_j |A_{0j}| of the translate image over the unit
// window (the dyadic grid is dense in the window, so the generating lattice
// drops out); b(T)^alpha = |w|^alpha (len + 2 T width) in the single-box
// k=1 case.
Quadratic translate_width(const FieldModel& model);

// CSV with header t,replication,m_t,seed,method,level plus digest/seed
// comment lines; byte-deterministic for a fixed dataset.
void write_csv(std::ostream& os, const MaximaDataset& ds);
MaximaDataset read_csv(std::istream& is);

}  // namespace sfl

#endif  // SFL_SIMULATE_HPP
