#include "sfl/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace sfl {

namespace {

constexpr int kMaxTranslateDims = 4;  // image coordinates handled by the fast path

struct Ent {
  std::array<long long, 2 * kMaxTranslateDims> key{};
  double rad = 0;
};

bool key_less(const Ent& a, const Ent& b, int width) {
  for (int i = 0; i < width; ++i) {
    if (a.key[i] != b.key[i]) return a.key[i] < b.key[i];
  }
  return false;
}

void sort_merge(std::vector<Ent>& v, int width) {
  std::sort(v.begin(), v.end(), [&](const Ent& a, const Ent& b) {
    for (int i = 0; i < width; ++i)
      if (a.key[i] != b.key[i]) return a.key[i] < b.key[i];
    return a.rad < b.rad;
  });
  size_t out = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    if (out > 0 && !key_less(v[out - 1], v[i], width)) {
      // duplicate key: the earlier entry already has the smaller radius
      continue;
    }
    v[out++] = v[i];
  }
  v.resize(out);
}

bool gamma0_is_diagonal(const QuadMatrix& g) {
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      if (i != j && !g.at(i, j).is_zero()) return false;
  return true;
}

long long to_ll_checked(const Int& x, const char* what) {
  if (!fits_long(x)) throw BudgetError(std::string(what) + ": exact value exceeds the fast-path integer range");
  return x.get_si();
}

}  // namespace

void GridSpec::validate() const {
  if (t_ladder.empty()) throw std::invalid_argument("grid: empty t ladder");
  double prev = 0.0;
  for (double t : t_ladder) {
    if (!(t > prev)) throw std::invalid_argument("grid: t ladder must be positive and strictly increasing");
    prev = t;
  }
  if (level < 0) throw std::invalid_argument("grid: level must be >= 0");
  if (replications < 1) throw std::invalid_argument("grid: need at least one replication");
}

std::string method_name(SimMethod m) { return m == SimMethod::cell ? "cell" : "series"; }

SimMethod method_from_name(const std::string& s) {
  if (s == "cell") return SimMethod::cell;
  if (s == "series") return SimMethod::series;
  throw std::invalid_argument("unknown method: " + s + " (expected cell or series)");
}

uint64_t point_budget_from_env(uint64_t fallback) {
  const char* env = std::getenv("STABLE_FIELD_LAB_BUDGET");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0)
    throw std::invalid_argument("STABLE_FIELD_LAB_BUDGET must be a positive integer");
  return v;
}

TranslateSet enumerate_translates(const FieldModel& model, double t_max, int level,
                                  uint64_t budget) {
  const ActionSpec& spec = model.spec;
  spec.validate();
  const int d = spec.d;
  const int k = spec.k();
  if (k < 1) throw std::invalid_argument("simulation requires at least one translation coordinate");
  if (k > kMaxTranslateDims)
    throw std::invalid_argument("simulation supports at most 4 translation coordinates");
  if (!(t_max > 0)) throw std::invalid_argument("window must be positive");
  if (level < 0) throw std::invalid_argument("level must be >= 0");

  const QuadMatrix ag = spec.translation_gamma();  // k x d
  const Rat t_rat = rat_from_double(t_max);
  const Int two_level = pow2(static_cast<unsigned long>(level));

  // Common denominator so that every translate key is integral.
  Int scale(1);
  for (const Quadratic& q : ag.e) {
    scale = lcm(scale, q.rational_part().get_den());
    scale = lcm(scale, q.surd_part().get_den());
  }
  // Scaled integer numerators of the image columns.
  std::vector<Int> col_a(size_t(k) * d), col_b(size_t(k) * d);
  for (int kk = 0; kk < k; ++kk)
    for (int j = 0; j < d; ++j) {
      Rat a = ag.at(kk, j).rational_part() * Rat(scale);
      Rat b = ag.at(kk, j).surd_part() * Rat(scale);
      a.canonicalize();
      b.canonicalize();
      col_a[size_t(kk) * d + j] = a.get_num();
      col_b[size_t(kk) * d + j] = b.get_num();
    }

  TranslateSet out;
  out.k = k;
  out.level = level;
  out.disc = spec.disc;
  out.key_denom = scale.get_d() * two_level.get_d();

  const int width = 2 * k;
  std::vector<Ent> ents;

  if (gamma0_is_diagonal(spec.gamma0)) {
    // Axis-by-axis accumulation: the image value is a sum of independent
    // per-axis contributions, and for diagonal Gamma_0 the window constraint
    // is a per-axis bound, so the minimum radius can be tracked alongside.
    std::vector<long long> bound(d);
    std::vector<double> step(d);
    Int range_check(0);
    for (int j = 0; j < d; ++j) {
      Quadratic gj = spec.gamma0.at(j, j).abs();
      Quadratic limit = Quadratic(t_rat * Rat(two_level)) / gj;
      Int b = quad_floor(limit);
      if (b < 0) b = 0;
      bound[j] = to_ll_checked(b, "translate grid");
      step[j] = gj.to_double() / two_level.get_d();
      Int worst(0);
      for (int kk = 0; kk < k; ++kk) {
        Int wa = abs(col_a[size_t(kk) * d + j]);
        Int wb = abs(col_b[size_t(kk) * d + j]);
        worst = std::max(worst, std::max(wa, wb));
      }
      range_check += worst * b;
    }
    if (!fits_long(range_check) || range_check.get_si() > (1LL << 62))
      throw BudgetError("translate keys exceed the exact fast-path range");

    ents.push_back(Ent{});
    for (int j = 0; j < d; ++j) {
      bool zero_col = true;
      for (int kk = 0; kk < k && zero_col; ++kk)
        if (col_a[size_t(kk) * d + j] != 0 || col_b[size_t(kk) * d + j] != 0) zero_col = false;
      if (zero_col) continue;  // only k_j = 0 can minimize the radius
      const unsigned long long grow = 2ULL * bound[j] + 1ULL;
      if (grow > budget || ents.size() > budget / grow)
        throw BudgetError("translate set exceeds the point budget");
      std::vector<Ent> next;
      next.reserve(ents.size() * grow);
      for (const Ent& e : ents) {
        for (long long kj = -bound[j]; kj <= bound[j]; ++kj) {
          Ent n = e;
          for (int kk = 0; kk < k; ++kk) {
            n.key[2 * kk] += kj * col_a[size_t(kk) * d + j].get_si();
            n.key[2 * kk + 1] += kj * col_b[size_t(kk) * d + j].get_si();
          }
          n.rad = std::max(e.rad, step[j] * double(std::llabs(kj)));
          next.push_back(n);
        }
      }
      sort_merge(next, width);
      if (next.size() > budget) throw BudgetError("translate set exceeds the point budget");
      ents = std::move(next);
    }
  } else {
    // General Gamma_0: enumerate the bounding box of the window parallelotope
    // and filter by the exact window condition.
    QuadMatrix inv = field_inverse(spec.gamma0);
    std::vector<long long> bound(d);
    Int cand(1);
    for (int j = 0; j < d; ++j) {
      Quadratic sum(0);
      for (int l = 0; l < d; ++l) sum += inv.at(j, l).abs();
      Int b = quad_floor(Quadratic(t_rat * Rat(two_level)) * sum) + 1;
      bound[j] = to_ll_checked(b, "translate grid");
      cand *= 2 * b + 1;
      if (cand > Int(static_cast<unsigned long>(budget)))
        throw BudgetError("translate grid exceeds the point budget");
    }
    Int range_check(0);
    for (int j = 0; j < d; ++j) {
      Int worst(0);
      for (int kk = 0; kk < k; ++kk) {
        Int wa = abs(col_a[size_t(kk) * d + j]);
        Int wb = abs(col_b[size_t(kk) * d + j]);
        worst = std::max(worst, std::max(wa, wb));
      }
      range_check += worst * Int(long(bound[j]));
    }
    if (!fits_long(range_check) || range_check.get_si() > (1LL << 62))
      throw BudgetError("translate keys exceed the exact fast-path range");

    const Quadratic t_quad(t_rat);
    const Rat inv_two_level = Rat(1) / Rat(two_level);
    std::vector<long long> kv(d, 0);
    for (int j = 0; j < d; ++j) kv[j] = -bound[j];
    bool done = false;
    while (!done) {
      // s = 2^-level Gamma0 kv, kept exact for the window test
      bool inside = true;
      std::vector<Quadratic> s(d);
      for (int i = 0; i < d && inside; ++i) {
        Quadratic acc(0);
        for (int j = 0; j < d; ++j) {
          if (kv[j] == 0) continue;
          acc += spec.gamma0.at(i, j) * Quadratic(Rat(long(kv[j])));
        }
        acc *= Quadratic(inv_two_level);
        s[i] = acc;
        if (acc.abs() > t_quad) inside = false;
      }
      if (inside) {
        Ent e;
        double rad = 0;
        for (int i = 0; i < d; ++i) rad = std::max(rad, std::fabs(s[i].to_double()));
        e.rad = rad;
        for (int kk = 0; kk < k; ++kk) {
          long long ka = 0, kb = 0;
          for (int j = 0; j < d; ++j) {
            ka += kv[j] * col_a[size_t(kk) * d + j].get_si();
            kb += kv[j] * col_b[size_t(kk) * d + j].get_si();
          }
          e.key[2 * kk] = ka;
          e.key[2 * kk + 1] = kb;
        }
        ents.push_back(e);
        if (ents.size() > 2 * budget) throw BudgetError("translate set exceeds the point budget");
      }
      done = true;
      for (int j = 0; j < d; ++j) {
        if (kv[j] < bound[j]) {
          ++kv[j];
          for (int l = 0; l < j; ++l) kv[l] = -bound[l];
          done = false;
          break;
        }
      }
    }
    sort_merge(ents, width);
    if (ents.size() > budget) throw BudgetError("translate set exceeds the point budget");
  }

  // Order by actual shift value (ascending, lexicographic across the k
  // coordinates) so interval searches work on the value axis.
  const double sqrt_disc = std::sqrt(double(spec.disc));
  auto shift_of = [&](const Ent& e, int kk) {
    return (double(e.key[2 * kk]) + double(e.key[2 * kk + 1]) * sqrt_disc) / out.key_denom;
  };
  std::sort(ents.begin(), ents.end(), [&](const Ent& a, const Ent& b) {
    for (int kk = 0; kk < k; ++kk) {
      double xa = shift_of(a, kk), xb = shift_of(b, kk);
      if (xa != xb) return xa < xb;
    }
    return key_less(a, b, width);
  });

  out.count = ents.size();
  out.keys.resize(out.count * width);
  out.shift.resize(out.count * k);
  out.radius.resize(out.count);
  for (size_t i = 0; i < out.count; ++i) {
    for (int w = 0; w < width; ++w) out.keys[i * width + w] = ents[i].key[w];
    for (int kk = 0; kk < k; ++kk) out.shift[i * k + kk] = shift_of(ents[i], kk);
    out.radius[i] = ents[i].rad;
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Sampling engines. The k = 1 paths carry all bundled models; the general-k
// paths are direct evaluations under the same budget guard.
// ---------------------------------------------------------------------------

struct BoxData {
  std::vector<double> w;
  std::vector<double> lo, hi;  // nboxes x k, row-major
  int nboxes = 0;
  int k = 1;
};

BoxData box_data(const FieldModel& model) {
  BoxData b;
  b.k = model.spec.k();
  b.nboxes = int(model.kernel.size());
  for (const KernelBox& box : model.kernel) {
    b.w.push_back(box.weight);
    for (int i = 0; i < b.k; ++i) {
      b.lo.push_back(box.lo[i].get_d());
      b.hi.push_back(box.hi[i].get_d());
    }
  }
  return b;
}

// f at a point of R^k.
double kernel_value(const BoxData& b, const double* x) {
  double f = 0;
  for (int l = 0; l < b.nboxes; ++l) {
    bool in = true;
    for (int i = 0; i < b.k && in; ++i)
      in = (x[i] >= b.lo[size_t(l) * b.k + i]) && (x[i] <= b.hi[size_t(l) * b.k + i]);
    if (in) f += b.w[l];
  }
  return f;
}

// Integrals of |f|^2 and |f|^alpha over R^k: exact on the piecewise-constant
// partition induced by the box edges.
void kernel_integrals(const BoxData& b, double alpha, double& int_f2, double& int_falpha) {
  std::vector<std::vector<double>> cuts(b.k);
  for (int i = 0; i < b.k; ++i) {
    for (int l = 0; l < b.nboxes; ++l) {
      cuts[i].push_back(b.lo[size_t(l) * b.k + i]);
      cuts[i].push_back(b.hi[size_t(l) * b.k + i]);
    }
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }
  int_f2 = 0;
  int_falpha = 0;
  std::vector<size_t> idx(b.k, 0);
  std::vector<double> mid(b.k);
  bool done = false;
  while (!done) {
    double vol = 1;
    bool nonempty = true;
    for (int i = 0; i < b.k; ++i) {
      if (idx[i] + 1 >= cuts[i].size()) {
        nonempty = false;
        break;
      }
      vol *= cuts[i][idx[i] + 1] - cuts[i][idx[i]];
      mid[i] = 0.5 * (cuts[i][idx[i]] + cuts[i][idx[i] + 1]);
    }
    if (nonempty) {
      double f = kernel_value(b, mid.data());
      if (f != 0) {
        int_f2 += f * f * vol;
        int_falpha += std::pow(std::fabs(f), alpha) * vol;
      }
    }
    done = true;
    for (int i = 0; i < b.k; ++i) {
      if (idx[i] + 2 < cuts[i].size()) {
        ++idx[i];
        for (int l = 0; l < i; ++l) idx[l] = 0;
        done = false;
        break;
      }
    }
  }
}

struct CellEngine {
  // k = 1 layout: cell c covers [c*h, (c+1)*h); values indexed by c - c0.
  double h = 1;
  long long c0 = 0;
  size_t ncells = 0;
  std::vector<double> wpow;                        // per box: w * h^{1/alpha}
  std::vector<long long> range;                    // per (shift, box): [s, e)
  int nboxes = 0;

  // general k layout
  int k = 1;
  std::vector<long long> g_c0;
  std::vector<size_t> g_count;
  size_t g_total = 1;
};

CellEngine build_cell_engine(const FieldModel& model, const TranslateSet& ts,
                             const BoxData& boxes, uint64_t budget) {
  CellEngine eng;
  eng.k = ts.k;
  eng.h = std::ldexp(1.0, -ts.level);
  eng.nboxes = boxes.nboxes;
  const double alpha = model.alpha;

  if (ts.k == 1) {
    double lo = 0, hi = 0;
    double smin = ts.shift.empty() ? 0 : ts.shift.front();
    double smax = ts.shift.empty() ? 0 : ts.shift.back();
    bool first = true;
    for (int l = 0; l < boxes.nboxes; ++l) {
      double bl = boxes.lo[l] - smax, bh = boxes.hi[l] - smin;
      if (first || bl < lo) lo = bl;
      if (first || bh > hi) hi = bh;
      first = false;
    }
    eng.c0 = (long long)std::floor(lo / eng.h) - 1;
    long long cend = (long long)std::floor(hi / eng.h) + 2;
    eng.ncells = size_t(cend - eng.c0);
    if (eng.ncells > budget) throw BudgetError("cell mesh exceeds the point budget");
    for (int l = 0; l < boxes.nboxes; ++l)
      eng.wpow.push_back(boxes.w[l] * std::pow(eng.h, 1.0 / alpha));
    eng.range.resize(ts.count * boxes.nboxes * 2);
    for (size_t si = 0; si < ts.count; ++si) {
      double v = ts.shift[si];
      for (int l = 0; l < boxes.nboxes; ++l) {
        long long s = (long long)std::ceil((boxes.lo[l] - v) / eng.h - 0.5);
        long long e = (long long)std::ceil((boxes.hi[l] - v) / eng.h - 0.5);
        s = std::max(s, eng.c0);
        e = std::min(e, eng.c0 + (long long)eng.ncells);
        if (e < s) e = s;
        eng.range[(si * boxes.nboxes + l) * 2] = s - eng.c0;
        eng.range[(si * boxes.nboxes + l) * 2 + 1] = e - eng.c0;
      }
    }
    return eng;
  }

  // general k
  eng.g_c0.resize(ts.k);
  eng.g_count.resize(ts.k);
  eng.g_total = 1;
  for (int i = 0; i < ts.k; ++i) {
    double smin = 1e300, smax = -1e300;
    for (size_t si = 0; si < ts.count; ++si) {
      smin = std::min(smin, ts.shift[si * ts.k + i]);
      smax = std::max(smax, ts.shift[si * ts.k + i]);
    }
    double lo = 1e300, hi = -1e300;
    for (int l = 0; l < boxes.nboxes; ++l) {
      lo = std::min(lo, boxes.lo[size_t(l) * ts.k + i] - smax);
      hi = std::max(hi, boxes.hi[size_t(l) * ts.k + i] - smin);
    }
    eng.g_c0[i] = (long long)std::floor(lo / eng.h) - 1;
    long long cend = (long long)std::floor(hi / eng.h) + 2;
    eng.g_count[i] = size_t(cend - eng.g_c0[i]);
    if (eng.g_count[i] == 0 || eng.g_total > budget / eng.g_count[i])
      throw BudgetError("cell mesh exceeds the point budget");
    eng.g_total *= eng.g_count[i];
  }
  for (int l = 0; l < boxes.nboxes; ++l)
    eng.wpow.push_back(boxes.w[l] * std::pow(std::pow(eng.h, ts.k), 1.0 / alpha));
  return eng;
}

void cell_values(const CellEngine& eng, const BoxData& boxes, const TranslateSet& ts,
                 Rng& rng, double alpha, std::vector<double>& x,
                 std::vector<double>& scratch) {
  if (eng.k == 1) {
    scratch.resize(eng.ncells + 1);
    scratch[0] = 0;
    for (size_t c = 0; c < eng.ncells; ++c) {
      double z = sample_standard_sas(alpha, rng);
      scratch[c + 1] = scratch[c] + z;
    }
    x.assign(ts.count, 0.0);
    for (size_t si = 0; si < ts.count; ++si) {
      double acc = 0;
      for (int l = 0; l < eng.nboxes; ++l) {
        long long s = eng.range[(si * eng.nboxes + l) * 2];
        long long e = eng.range[(si * eng.nboxes + l) * 2 + 1];
        acc += eng.wpow[l] * (scratch[size_t(e)] - scratch[size_t(s)]);
      }
      x[si] = acc;
    }
    return;
  }

  // general k: draw every cell, then sum the box ranges per shift
  scratch.resize(eng.g_total);
  for (size_t c = 0; c < eng.g_total; ++c) scratch[c] = sample_standard_sas(alpha, rng);
  x.assign(ts.count, 0.0);
  std::vector<long long> s(eng.k), e(eng.k), cur(eng.k);
  for (size_t si = 0; si < ts.count; ++si) {
    double acc = 0;
    for (int l = 0; l < eng.nboxes; ++l) {
      bool empty = false;
      for (int i = 0; i < eng.k; ++i) {
        double v = ts.shift[si * eng.k + i];
        long long a = (long long)std::ceil((boxes.lo[size_t(l) * eng.k + i] - v) / eng.h - 0.5);
        long long b = (long long)std::ceil((boxes.hi[size_t(l) * eng.k + i] - v) / eng.h - 0.5);
        a = std::max(a, eng.g_c0[i]);
        b = std::min(b, eng.g_c0[i] + (long long)eng.g_count[i]);
        if (b <= a) {
          empty = true;
          break;
        }
        s[i] = a;
        e[i] = b;
      }
      if (empty) continue;
      cur = s;
      while (true) {
        size_t idx = 0;
        for (int i = eng.k - 1; i >= 0; --i) idx = idx * eng.g_count[i] + size_t(cur[i] - eng.g_c0[i]);
        acc += eng.wpow[l] * scratch[idx];
        int i = 0;
        for (; i < eng.k; ++i) {
          if (cur[i] + 1 < e[i]) {
            ++cur[i];
            for (int l2 = 0; l2 < i; ++l2) cur[l2] = s[l2];
            break;
          }
        }
        if (i == eng.k) break;
      }
    }
    x[si] = acc;
  }
}

struct SeriesEngine {
  std::vector<double> lo, hi;  // truncation region per coordinate
  double vol = 1;
  long terms = 0;
  double coef0 = 0;  // C_alpha^{1/alpha} * vol^{1/alpha}
};

SeriesEngine build_series_engine(const FieldModel& model, const TranslateSet& ts,
                                 const BoxData& boxes, uint64_t budget) {
  SeriesEngine eng;
  const double alpha = model.alpha;
  eng.lo.resize(ts.k);
  eng.hi.resize(ts.k);
  for (int i = 0; i < ts.k; ++i) {
    double smin = 1e300, smax = -1e300;
    for (size_t si = 0; si < ts.count; ++si) {
      smin = std::min(smin, ts.shift[si * ts.k + i]);
      smax = std::max(smax, ts.shift[si * ts.k + i]);
    }
    double lo = 1e300, hi = -1e300;
    for (int l = 0; l < boxes.nboxes; ++l) {
      lo = std::min(lo, boxes.lo[size_t(l) * ts.k + i] - smax);
      hi = std::max(hi, boxes.hi[size_t(l) * ts.k + i] - smin);
    }
    if (!(hi > lo)) throw std::logic_error("series: degenerate truncation region");
    eng.lo[i] = lo;
    eng.hi[i] = hi;
    eng.vol *= hi - lo;
  }
  // Truncation length: enough terms that the residual scale estimate drops
  // below 1e-3 of ||f||_alpha, capped at 1e5.
  double int_f2 = 0, int_falpha = 0;
  kernel_integrals(boxes, alpha, int_f2, int_falpha);
  if (!(int_falpha > 0)) throw std::invalid_argument("series: kernel has zero alpha-norm");
  const double c_alpha = tail_constant(alpha);
  const double target = 1e-3 * std::pow(int_falpha, 1.0 / alpha);
  const double lead = std::pow(c_alpha, 2.0 / alpha) * std::pow(eng.vol, 2.0 / alpha - 1.0) *
                      int_f2 * alpha / (2.0 - alpha);
  double j_star = std::pow(lead / (target * target), alpha / (2.0 - alpha));
  if (!std::isfinite(j_star)) j_star = 1e18;
  eng.terms = (long)std::min(100000.0, std::max(1000.0, std::ceil(j_star)));
  eng.coef0 = std::pow(c_alpha, 1.0 / alpha) * std::pow(eng.vol, 1.0 / alpha);
  if (ts.k > 1 && uint64_t(eng.terms) > budget / std::max<size_t>(ts.count, 1))
    throw BudgetError("series evaluation exceeds the point budget");
  return eng;
}

void series_values(const SeriesEngine& eng, const BoxData& boxes, const TranslateSet& ts,
                   Rng& rng, double alpha, std::vector<double>& x,
                   std::vector<double>& scratch) {
  if (ts.k == 1) {
    scratch.assign(ts.count + 1, 0.0);
    const double* sh = ts.shift.data();
    double gamma = 0;
    for (long j = 0; j < eng.terms; ++j) {
      gamma += rng.exponential();
      const double eps = rng.sign_flip();
      const double v = rng.uniform(eng.lo[0], eng.hi[0]);
      const double coef = eps * eng.coef0 * std::pow(gamma, -1.0 / alpha);
      for (int l = 0; l < boxes.nboxes; ++l) {
        const double a = boxes.lo[l] - v, b = boxes.hi[l] - v;
        size_t sa = std::lower_bound(sh, sh + ts.count, a) - sh;
        size_t se = std::upper_bound(sh, sh + ts.count, b) - sh;
        if (se > sa) {
          scratch[sa] += coef * boxes.w[l];
          scratch[se] -= coef * boxes.w[l];
        }
      }
    }
    x.assign(ts.count, 0.0);
    double acc = 0;
    for (size_t si = 0; si < ts.count; ++si) {
      acc += scratch[si];
      x[si] = acc;
    }
    return;
  }

  x.assign(ts.count, 0.0);
  std::vector<double> pt(ts.k);
  double gamma = 0;
  for (long j = 0; j < eng.terms; ++j) {
    gamma += rng.exponential();
    const double eps = rng.sign_flip();
    for (int i = 0; i < ts.k; ++i) pt[i] = rng.uniform(eng.lo[i], eng.hi[i]);
    const double coef = eps * eng.coef0 * std::pow(gamma, -1.0 / alpha);
    for (size_t si = 0; si < ts.count; ++si) {
      double xv[kMaxTranslateDims];
      for (int i = 0; i < ts.k; ++i) xv[i] = pt[i] + ts.shift[si * ts.k + i];
      double f = kernel_value(boxes, xv);
      if (f != 0) x[si] += coef * f;
    }
  }
}

void field_values(const FieldModel& model, const TranslateSet& ts, const BoxData& boxes,
                  const CellEngine* cell, const SeriesEngine* series, SimMethod method,
                  uint64_t seed, std::vector<double>& x, std::vector<double>& scratch) {
  Rng rng(seed);
  if (method == SimMethod::cell)
    cell_values(*cell, boxes, ts, rng, model.alpha, x, scratch);
  else
    series_values(*series, boxes, ts, rng, model.alpha, x, scratch);
}

void require_field(const FieldModel& model) {
  model.validate();
  if (!model.has_field())
    throw std::invalid_argument("model does not define a field (alpha and kernel required)");
  if (model.spec.k() < 1)
    throw std::invalid_argument("simulation requires at least one translation coordinate");
  // Overlapping boxes with opposite weights can cancel to f = 0.
  double int_f2 = 0, int_falpha = 0;
  kernel_integrals(box_data(model), model.alpha, int_f2, int_falpha);
  if (!(int_falpha > 0))
    throw std::invalid_argument("kernel has zero alpha-norm (weights cancel)");
}

}  // namespace

FieldSample simulate_field(const FieldModel& model, double t, int level,
                           SimMethod method, uint64_t seed, uint64_t budget) {
  require_field(model);
  if (!(t > 0)) throw std::invalid_argument("simulate_field: window must be positive");

  TranslateSet ts = enumerate_translates(model, t, level, budget);
  BoxData boxes = box_data(model);
  CellEngine cell;
  SeriesEngine series;
  if (method == SimMethod::cell)
    cell = build_cell_engine(model, ts, boxes, budget);
  else
    series = build_series_engine(model, ts, boxes, budget);

  std::vector<double> x, scratch;
  field_values(model, ts, boxes, &cell, &series, method, seed, x, scratch);

  // Materialize the grid points and map each to its translate.
  const ActionSpec& spec = model.spec;
  const int d = spec.d;
  const int k = spec.k();
  const int width = 2 * k;
  std::map<std::vector<long long>, size_t> index;
  for (size_t si = 0; si < ts.count; ++si) {
    std::vector<long long> key(ts.keys.begin() + si * width, ts.keys.begin() + (si + 1) * width);
    index.emplace(std::move(key), si);
  }

  const Rat t_rat = rat_from_double(t);
  const Int two_level = pow2(static_cast<unsigned long>(level));
  Int scale(1);
  QuadMatrix ag = spec.translation_gamma();
  for (const Quadratic& q : ag.e) {
    scale = lcm(scale, q.rational_part().get_den());
    scale = lcm(scale, q.surd_part().get_den());
  }

  QuadMatrix inv = field_inverse(spec.gamma0);
  std::vector<long long> bound(d);
  uint64_t cand = 1;
  for (int j = 0; j < d; ++j) {
    Quadratic sum(0);
    for (int l = 0; l < d; ++l) sum += inv.at(j, l).abs();
    Int b = quad_floor(Quadratic(t_rat * Rat(two_level)) * sum) + 1;
    bound[j] = to_ll_checked(b, "grid");
    if (cand > budget / uint64_t(2 * bound[j] + 1)) throw BudgetError("grid exceeds the point budget");
    cand *= uint64_t(2 * bound[j] + 1);
  }

  FieldSample out;
  out.method = method;
  out.seed = seed;
  out.level = level;
  const Quadratic t_quad(t_rat);
  const Rat inv_two_level = Rat(1) / Rat(two_level);
  std::vector<long long> kv(d);
  for (int j = 0; j < d; ++j) kv[j] = -bound[j];
  while (true) {
    bool inside = true;
    for (int i = 0; i < d && inside; ++i) {
      Quadratic acc(0);
      for (int j = 0; j < d; ++j) {
        if (kv[j] == 0) continue;
        acc += spec.gamma0.at(i, j) * Quadratic(Rat(long(kv[j])));
      }
      acc *= Quadratic(inv_two_level);
      if (acc.abs() > t_quad) inside = false;
    }
    if (inside) {
      std::vector<long long> key(width, 0);
      for (int kk = 0; kk < k; ++kk) {
        Int ka(0), kb(0);
        for (int j = 0; j < d; ++j) {
          if (kv[j] == 0) continue;
          Rat a = ag.at(kk, j).rational_part() * Rat(scale);
          Rat b = ag.at(kk, j).surd_part() * Rat(scale);
          a.canonicalize();
          b.canonicalize();
          ka += a.get_num() * Int(long(kv[j]));
          kb += b.get_num() * Int(long(kv[j]));
        }
        key[2 * kk] = ka.get_si();
        key[2 * kk + 1] = kb.get_si();
      }
      auto it = index.find(key);
      if (it == index.end()) throw std::logic_error("simulate_field: grid point without translate");
      out.points.push_back(kv);
      out.values.push_back(x[it->second]);
    }
    int j = 0;
    for (; j < d; ++j) {
      if (kv[j] < bound[j]) {
        ++kv[j];
        for (int l = 0; l < j; ++l) kv[l] = -bound[l];
        break;
      }
    }
    if (j == d) break;
  }
  return out;
}

double FieldSample::value_at(const std::vector<long long>& coord) const {
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i] == coord) return values[i];
  throw std::out_of_range("no such grid point in the sample");
}

int MaximaDataset::replications() const {
  int r = 0;
  for (const MaximaRow& row : rows) r = std::max(r, row.replication + 1);
  return r;
}

std::vector<double> MaximaDataset::values_for(double t) const {
  std::vector<double> out;
  for (const MaximaRow& row : rows)
    if (row.t == t) out.push_back(row.m_t);
  return out;
}

MaximaDataset partial_maxima(const FieldModel& model, const GridSpec& grid,
                             SimMethod method, uint64_t budget) {
  require_field(model);
  grid.validate();

  const double t_max = grid.t_ladder.back();
  TranslateSet ts = enumerate_translates(model, t_max, grid.level, budget);
  BoxData boxes = box_data(model);
  CellEngine cell;
  SeriesEngine series;
  if (method == SimMethod::cell)
    cell = build_cell_engine(model, ts, boxes, budget);
  else
    series = build_series_engine(model, ts, boxes, budget);

  // First ladder window that reaches each translate.
  const size_t nt = grid.t_ladder.size();
  std::vector<uint32_t> bucket(ts.count);
  for (size_t si = 0; si < ts.count; ++si) {
    size_t b = std::lower_bound(grid.t_ladder.begin(), grid.t_ladder.end(), ts.radius[si]) -
               grid.t_ladder.begin();
    if (b >= nt) throw std::logic_error("partial_maxima: translate outside the largest window");
    bucket[si] = uint32_t(b);
  }

  const int reps = grid.replications;
  std::vector<std::vector<double>> maxima(size_t(reps), std::vector<double>(nt, 0.0));

  unsigned nthreads = std::max(1u, std::min(std::thread::hardware_concurrency(),
                                            static_cast<unsigned>(reps)));
  auto worker = [&](unsigned w) {
    std::vector<double> x, scratch;
    for (int rep = int(w); rep < reps; rep += int(nthreads)) {
      uint64_t sub = Rng::substream_seed(grid.seed, uint64_t(rep));
      field_values(model, ts, boxes, &cell, &series, method, sub, x, scratch);
      std::vector<double>& m = maxima[size_t(rep)];
      std::fill(m.begin(), m.end(), 0.0);
      for (size_t si = 0; si < ts.count; ++si) {
        double a = std::fabs(x[si]);
        if (a > m[bucket[si]]) m[bucket[si]] = a;
      }
      for (size_t i = 1; i < nt; ++i) m[i] = std::max(m[i], m[i - 1]);
    }
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nthreads; ++w) pool.emplace_back(worker, w);
    for (auto& th : pool) th.join();
  }

  MaximaDataset ds;
  ds.t_ladder = grid.t_ladder;
  ds.level = grid.level;
  ds.method = method;
  ds.model_digest = model.digest;
  ds.master_seed = grid.seed;
  for (size_t ti = 0; ti < nt; ++ti)
    for (int rep = 0; rep < reps; ++rep)
      ds.rows.push_back(MaximaRow{grid.t_ladder[ti], rep, maxima[size_t(rep)][ti],
                                  Rng::substream_seed(grid.seed, uint64_t(rep))});
  return ds;
}

Quadratic translate_width(const FieldModel& model) {
  model.spec.validate();
  if (model.spec.k() != 1)
    throw std::invalid_argument("translate_width: needs exactly one translation coordinate");
  // The window is a cube in ambient coordinates and the dyadic closure of
  // any rank-d lattice is dense in R^d, so the reach of A t over the window
  // [-T1, T1] is T times the absolute row sum of A itself.
  Quadratic s(0);
  for (int j = 0; j < model.spec.translation.cols; ++j)
    s += model.spec.translation.at(0, j).abs();
  return s;
}

Quadratic bt_exact_alpha_power(const FieldModel& model, const Rat& T) {
  require_field(model);
  if (model.spec.k() != 1 || model.kernel.size() != 1)
    throw std::invalid_argument("exact b(T) needs a single box and one translation coordinate");
  const KernelBox& box = model.kernel[0];
  if (std::fabs(box.weight) != 1.0)
    throw std::invalid_argument("exact b(T) needs a unit-weight box");
  if (T < 0) throw std::invalid_argument("b(T): T must be >= 0");
  Quadratic len(box.hi[0] - box.lo[0]);
  return len + Quadratic(Rat(2) * T) * translate_width(model);
}

double bT_exact_indicator(const FieldModel& model, double T) {
  require_field(model);
  if (model.spec.k() != 1 || model.kernel.size() != 1)
    throw std::invalid_argument("exact b(T) needs a single box and one translation coordinate");
  const KernelBox& box = model.kernel[0];
  Quadratic len(box.hi[0] - box.lo[0]);
  Quadratic val = len + Quadratic(Rat(2) * rat_from_double(T)) * translate_width(model);
  return std::fabs(box.weight) * std::pow(val.to_double(), 1.0 / model.alpha);
}

double bT_numeric(const FieldModel& model, double T, double mesh, int level,
                  uint64_t budget) {
  require_field(model);
  if (!(mesh > 0)) throw std::invalid_argument("bT_numeric: mesh must be positive");
  TranslateSet ts = enumerate_translates(model, T, level, budget);
  BoxData boxes = box_data(model);
  const double alpha = model.alpha;

  if (ts.k == 1) {
    const double* sh = ts.shift.data();
    const size_t n = ts.count;
    double lo = 1e300, hi = -1e300;
    for (int l = 0; l < boxes.nboxes; ++l) {
      lo = std::min(lo, boxes.lo[l] - sh[n - 1]);
      hi = std::max(hi, boxes.hi[l] - sh[0]);
    }
    long long c0 = (long long)std::floor(lo / mesh) - 1;
    long long c1 = (long long)std::floor(hi / mesh) + 2;
    if (uint64_t(c1 - c0) > budget) throw BudgetError("bT mesh exceeds the point budget");
    double total = 0;
    for (long long c = c0; c < c1; ++c) {
      const double xm = (double(c) + 0.5) * mesh;
      // sup over translates of |f(x + shift)|: the map is piecewise constant
      // in the shift, so probing the first grid shift at or after each box
      // breakpoint covers every attained value.
      double best = 0;
      for (int l = 0; l < boxes.nboxes; ++l) {
        const double enter = boxes.lo[l] - xm;
        const double leave = boxes.hi[l] - xm;
        size_t i1 = std::lower_bound(sh, sh + n, enter) - sh;
        size_t i2 = std::upper_bound(sh, sh + n, leave) - sh;
        for (size_t i : {i1, i2}) {
          if (i >= n) continue;
          double xv = xm + sh[i];
          double f = std::fabs(kernel_value(boxes, &xv));
          if (f > best) best = f;
        }
      }
      if (best > 0) total += std::pow(best, alpha) * mesh;
    }
    return std::pow(total, 1.0 / alpha);
  }

  // general k: direct max over translates per mesh cell
  std::vector<double> lo(ts.k, 1e300), hi(ts.k, -1e300);
  for (int i = 0; i < ts.k; ++i) {
    double smin = 1e300, smax = -1e300;
    for (size_t si = 0; si < ts.count; ++si) {
      smin = std::min(smin, ts.shift[si * ts.k + i]);
      smax = std::max(smax, ts.shift[si * ts.k + i]);
    }
    for (int l = 0; l < boxes.nboxes; ++l) {
      lo[i] = std::min(lo[i], boxes.lo[size_t(l) * ts.k + i] - smax);
      hi[i] = std::max(hi[i], boxes.hi[size_t(l) * ts.k + i] - smin);
    }
  }
  std::vector<long long> c0(ts.k), cnt(ts.k);
  uint64_t total_cells = 1;
  for (int i = 0; i < ts.k; ++i) {
    c0[i] = (long long)std::floor(lo[i] / mesh) - 1;
    long long c1 = (long long)std::floor(hi[i] / mesh) + 2;
    cnt[i] = c1 - c0[i];
    if (total_cells > budget / uint64_t(cnt[i])) throw BudgetError("bT mesh exceeds the point budget");
    total_cells *= uint64_t(cnt[i]);
  }
  if (total_cells > budget / std::max<uint64_t>(1, ts.count))
    throw BudgetError("bT mesh x grid exceeds the point budget");
  std::vector<long long> cur(ts.k, 0);
  double total = 0;
  while (true) {
    double xm[kMaxTranslateDims];
    for (int i = 0; i < ts.k; ++i) xm[i] = (double(c0[i] + cur[i]) + 0.5) * mesh;
    double best = 0;
    double xv[kMaxTranslateDims];
    for (size_t si = 0; si < ts.count; ++si) {
      for (int i = 0; i < ts.k; ++i) xv[i] = xm[i] + ts.shift[si * ts.k + i];
      double f = std::fabs(kernel_value(boxes, xv));
      if (f > best) best = f;
    }
    if (best > 0) total += std::pow(best, alpha) * std::pow(mesh, ts.k);
    int i = 0;
    for (; i < ts.k; ++i) {
      if (cur[i] + 1 < cnt[i]) {
        ++cur[i];
        for (int l = 0; l < i; ++l) cur[l] = 0;
        break;
      }
    }
    if (i == ts.k) break;
  }
  return std::pow(total, 1.0 / alpha);
}

void write_csv(std::ostream& os, const MaximaDataset& ds) {
  char buf[64];
  os << "# model_digest=" << ds.model_digest << "\n";
  os << "# master_seed=" << ds.master_seed << "\n";
  os << "t,replication,m_t,seed,method,level\n";
  for (const MaximaRow& r : ds.rows) {
    snprintf(buf, sizeof buf, "%.17g", r.t);
    os << buf << "," << r.replication << ",";
    snprintf(buf, sizeof buf, "%.17g", r.m_t);
    os << buf << "," << r.seed << "," << method_name(ds.method) << "," << ds.level << "\n";
  }
}

MaximaDataset read_csv(std::istream& is) {
  MaximaDataset ds;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string dig = "# model_digest=";
      const std::string seed = "# master_seed=";
      if (line.rfind(dig, 0) == 0) ds.model_digest = line.substr(dig.size());
      if (line.rfind(seed, 0) == 0) ds.master_seed = std::strtoull(line.c_str() + seed.size(), nullptr, 10);
      continue;
    }
    if (!header_seen) {
      if (line != "t,replication,m_t,seed,method,level")
        throw std::invalid_argument("dataset CSV: unexpected header: " + line);
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    MaximaRow row;
    std::getline(ls, field, ',');
    row.t = std::strtod(field.c_str(), nullptr);
    std::getline(ls, field, ',');
    row.replication = std::atoi(field.c_str());
    std::getline(ls, field, ',');
    row.m_t = std::strtod(field.c_str(), nullptr);
    std::getline(ls, field, ',');
    row.seed = std::strtoull(field.c_str(), nullptr, 10);
    std::getline(ls, field, ',');
    ds.method = method_from_name(field);
    std::getline(ls, field, ',');
    ds.level = std::atoi(field.c_str());
    ds.rows.push_back(row);
    if (ds.t_ladder.empty() || ds.t_ladder.back() != row.t) {
      if (std::find(ds.t_ladder.begin(), ds.t_ladder.end(), row.t) == ds.t_ladder.end())
        ds.t_ladder.push_back(row.t);
    }
  }
  if (!header_seen) throw std::invalid_argument("dataset CSV: missing header");
  std::sort(ds.t_ladder.begin(), ds.t_ladder.end());
  return ds;
}

}  // namespace sfl
