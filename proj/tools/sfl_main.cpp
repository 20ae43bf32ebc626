// stable-field-lab command line: classify an action model, simulate partial
// maxima of the stable field it defines, and test the predicted growth law.
//
// Exit codes:
//   0  success (verdict / covering confirmed where applicable)
//   1  malformed model document or I/O failure
//   2  group-theoretic dimension p = 0
//   3  resource budget exceeded
//   4  model/dataset digest mismatch
//   5  verdict did not match the predicted branch, or no covering constant found

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sfl/analysis.hpp"
#include "sfl/covering.hpp"

namespace {

using namespace sfl;

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::strtod(tok.c_str(), nullptr));
  }
  if (out.empty()) throw CLI::ValidationError("ladder must be a comma-separated list of numbers");
  return out;
}

std::string torsion_str(const std::vector<Int>& tors) {
  std::string s = "{";
  for (size_t i = 0; i < tors.size(); ++i) s += (i ? ", " : "") + tors[i].get_str();
  return s + "}";
}

int cmd_dim(const std::string& model_path, int levels) {
  FieldModel model = load_model(model_path);
  Classification cls;
  if (model.alpha > 0)
    cls = classify(model.spec, model.alpha, levels);
  else {
    cls = effective_dimension(model.spec, levels);
    cls.conservative = is_conservative(model.spec, cls.free_lift);
    cls.branch = cls.conservative ? LimitBranch::degenerate : LimitBranch::frechet;
  }
  std::cout << "p = " << cls.p << "\n";
  for (size_t i = 0; i < cls.torsion_profile.size(); ++i)
    std::cout << "torsion[i=" << i << "] = " << torsion_str(cls.torsion_profile[i]) << "\n";
  std::cout << "free_lift_columns =";
  for (int j = 0; j < cls.free_lift.cols(); ++j) {
    std::cout << " (";
    for (int i = 0; i < cls.free_lift.rows(); ++i)
      std::cout << (i ? "," : "") << cls.free_lift.at(i, j).get_str();
    std::cout << ")";
  }
  std::cout << "\n";
  std::cout << (cls.conservative ? "conservative" : "dissipative") << "\n";
  std::cout << "predicted_exponent = " << cls.p << "/alpha";
  if (model.alpha > 0) std::cout << " = " << cls.p / model.alpha << " (alpha = " << model.alpha << ")";
  std::cout << "\n";
  std::cout << "branch = "
            << (cls.branch == LimitBranch::frechet ? "frechet" : "degenerate-at-0") << "\n";
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& out_path,
                 const std::string& ladder, int level, int reps, uint64_t seed,
                 const std::string& method, bool diagnose_level) {
  FieldModel model = load_model(model_path);
  GridSpec grid;
  grid.t_ladder = parse_ladder(ladder);
  grid.level = level;
  grid.replications = reps;
  grid.seed = seed;
  MaximaDataset ds = partial_maxima(model, grid, method_from_name(method),
                                    point_budget_from_env());
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  write_csv(out, ds);
  std::cout << "rows = " << ds.rows.size() << "\n";
  for (double t : ds.t_ladder) {
    std::cout << "median m_t at t=" << t << ": " << median(ds.values_for(t)) << "\n";
  }
  if (diagnose_level) {
    // Skeleton convergence check: rerun one level finer and compare medians.
    GridSpec finer = grid;
    finer.level = level + 1;
    MaximaDataset fds = partial_maxima(model, finer, method_from_name(method),
                                       point_budget_from_env());
    std::cout << "level diagnostic (n=" << level << " vs n=" << level + 1 << "):\n";
    for (double t : ds.t_ladder) {
      double a = median(ds.values_for(t)), b = median(fds.values_for(t));
      std::cout << "  t=" << t << ": median ratio " << (a != 0 ? b / a : 0.0) << "\n";
    }
  }
  return 0;
}

int cmd_verdict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, double ks_threshold, double slope_tol) {
  FieldModel model = load_model(model_path);
  if (!(model.alpha > 0)) throw ModelFormatError("verdict needs a model with alpha");
  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + data_path);
  MaximaDataset ds = read_csv(in);
  if (ds.model_digest != model.digest) {
    std::cerr << "dataset digest " << ds.model_digest << " does not match model digest "
              << model.digest << "\n";
    return 4;
  }
  Classification cls = classify(model.spec, model.alpha);
  ScalingReport sr = estimate_scaling_exponent(ds, cls.predicted_exponent, slope_tol);
  FrechetFit fit;
  bool have_fit = false;
  double k_scale = 0;
  if (!cls.conservative) {
    k_scale = limit_scale_prediction(model, cls);
    fit = frechet_gof(ds, model.alpha, k_scale, cls.predicted_exponent, cls, ks_threshold);
    have_fit = true;
  }
  std::string doc = report_to_json(sr, have_fit ? &fit : nullptr, model.digest, model.alpha,
                                   k_scale, ks_threshold, slope_tol);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << doc << "\n";
  std::cout << "verdict = " << verdict_name(sr.verdict) << "\n";
  if (have_fit)
    std::cout << "frechet_ks_pass = " << (fit.pass ? "true" : "false") << "\n";
  Verdict expected = cls.conservative ? Verdict::conservative_consistent
                                      : Verdict::dissipative_consistent;
  return sr.verdict == expected ? 0 : 5;
}

int cmd_bt(const std::string& model_path, const std::string& ladder,
           const std::string& out_path, double mesh, int bt_level) {
  FieldModel model = load_model(model_path);
  if (!(model.alpha > 0)) throw ModelFormatError("bt needs a model with alpha");
  Classification cls = classify(model.spec, model.alpha);
  std::vector<double> ts = parse_ladder(ladder);
  std::ostringstream csv;
  csv << "T,b_T,b_T_scaled\n";
  bool exact_path = (model.spec.k() == 1 && model.kernel.size() == 1);
  double last_scaled = 0;
  char buf[64];
  for (double t : ts) {
    double b = exact_path ? bT_exact_indicator(model, t)
                          : bT_numeric(model, t, mesh, bt_level, point_budget_from_env());
    double scaled = std::pow(t, -double(cls.p) / model.alpha) * b;
    last_scaled = scaled;
    snprintf(buf, sizeof buf, "%.17g", t);
    csv << buf << ",";
    snprintf(buf, sizeof buf, "%.17g", b);
    csv << buf << ",";
    snprintf(buf, sizeof buf, "%.17g", scaled);
    csv << buf << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << csv.str();
  }
  std::cout << csv.str();
  std::cout << "path = " << (exact_path ? "exact" : "numeric") << "\n";
  if (ts.size() >= 2)
    std::cout << "apparent limit of T^(-p/alpha) b(T): " << last_scaled << "\n";
  return 0;
}

int cmd_covering(const std::string& model_path, long n_probe, int m_probe, long m_max,
                 long verify_m) {
  FieldModel model = load_model(model_path);
  Classification cls = model.alpha > 0 ? classify(model.spec, model.alpha)
                                       : effective_dimension(model.spec, 3);
  IntMatrix kernel = kernel_lattice(model.spec, 0).basis;
  QuotientDecomposition qd = quotient_decomposition(model.spec.d, kernel);
  std::cout << "u columns: " << qd.free_lift_basis.cols()
            << ", v columns: " << qd.kernel_basis.cols() << "\n";
  if (verify_m >= 0) {
    bool ok = true;
    for (long n = 1; n <= n_probe && ok; ++n)
      for (int lev = 0; lev <= m_probe && ok; ++lev)
        ok = verify_covering(verify_m, qd.free_lift_basis, qd.kernel_basis, n, lev);
    std::cout << "verify M=" << verify_m << ": " << (ok ? "true" : "false") << "\n";
    return ok ? 0 : 5;
  }
  std::optional<long> m = covering_constant_search(qd.free_lift_basis, qd.kernel_basis,
                                                   n_probe, m_probe, m_max);
  if (m) {
    std::cout << "covering constant M = " << *m << " (probes n<=" << n_probe
              << ", m<=" << m_probe << ")\n";
    return 0;
  }
  std::cout << "no covering constant found up to M_max = " << m_max << "\n";
  return 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stable-field-lab: group-theoretic dimension and partial-maxima "
               "growth of stationary symmetric alpha-stable random fields"};
  app.require_subcommand(1);

  std::string model_path, out_path, data_path, ladder = "8,16,32,64", method = "cell";
  int level = 2, reps = 200, levels = 3, bt_level = 3;
  uint64_t seed = 1;
  double ks_threshold = 0.15, slope_tol = 0.15, mesh = 0.01;
  long n_probe = 2, m_max = 8, verify_m = -1;
  int m_probe = 1;

  auto* dim = app.add_subcommand("dim", "classify an action model: p, torsion, conservativity");
  dim->add_option("--model", model_path, "model JSON file")->required();
  dim->add_option("--levels", levels, "refinement levels to cross-check (default 3)");

  auto* sim = app.add_subcommand("simulate", "sample partial maxima over a t ladder");
  sim->add_option("--model", model_path)->required();
  sim->add_option("--out", out_path, "output CSV")->required();
  sim->add_option("--t-ladder", ladder, "comma-separated window sizes (default 8,16,32,64)");
  sim->add_option("--level", level, "skeleton level n (default 2)");
  sim->add_option("--reps", reps, "replications (default 200)");
  sim->add_option("--seed", seed, "master seed (default 1)");
  sim->add_option("--method", method, "cell | series (default cell)");
  bool diagnose_level = false;
  sim->add_flag("--diagnose-level", diagnose_level,
                "also run one skeleton level finer and report median ratios");

  auto* ver = app.add_subcommand("verdict", "compare a dataset against the predicted growth law");
  ver->add_option("--model", model_path)->required();
  ver->add_option("--data", data_path, "dataset CSV from simulate")->required();
  ver->add_option("--out", out_path, "output report JSON")->required();
  ver->add_option("--ks-threshold", ks_threshold, "KS pass threshold (default 0.15)");
  ver->add_option("--slope-tol", slope_tol, "slope tolerance (default 0.15)");

  auto* bt = app.add_subcommand("bt", "deterministic scale function b(T) over a T ladder");
  bt->add_option("--model", model_path)->required();
  bt->add_option("--T-ladder", ladder, "comma-separated T values")->required();
  bt->add_option("--out", out_path, "optional output CSV");
  bt->add_option("--mesh", mesh, "mesh for the numeric path (default 0.01)");
  bt->add_option("--bt-level", bt_level, "skeleton level for the numeric path (default 3)");

  auto* cov = app.add_subcommand("covering", "covering constant search for the model's basis");
  cov->add_option("--model", model_path)->required();
  cov->add_option("--n-probe", n_probe, "largest window n to check (default 2)");
  cov->add_option("--m-probe", m_probe, "finest level m to check (default 1)");
  cov->add_option("--M-max", m_max, "search bound (default 8)");
  cov->add_option("--verify-M", verify_m, "verify this M instead of searching");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dim) return cmd_dim(model_path, levels);
    if (*sim)
      return cmd_simulate(model_path, out_path, ladder, level, reps, seed, method,
                          diagnose_level);
    if (*ver) return cmd_verdict(model_path, data_path, out_path, ks_threshold, slope_tol);
    if (*bt) return cmd_bt(model_path, ladder, out_path, mesh, bt_level);
    if (*cov) return cmd_covering(model_path, n_probe, m_probe, m_max, verify_m);
  } catch (const ModelFormatError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what()
              << " (raise STABLE_FIELD_LAB_BUDGET to override)\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
