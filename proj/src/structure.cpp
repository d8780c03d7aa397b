#include "lienard/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lienard {

namespace {

// Sign of f_n at u when |f_n(u)| clears the margin, else 0.
int margin_sign(const Expr& f_n, double u, double margin) {
  try {
    const double v = evaluate(f_n, u);
    if (std::abs(v) < margin) return 0;
    return v > 0 ? 1 : -1;
  } catch (const DomainError&) {
    return 0;
  }
}

// Boundary between a failing point and a passing point.
double refine(const Expr& f_n, double fail, double pass, int sign, double margin) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (fail + pass);
    if (mid == fail || mid == pass) break;
    if (margin_sign(f_n, mid, margin) == sign)
      pass = mid;
    else
      fail = mid;
  }
  return pass;
}

struct Run {
  Interval range;
  int sign = 0;
  Eigen::Index count = 0;
  double mid_value = 0.0;
};

}  // namespace

double default_margin(const Expr& f_n, const Interval& I, int grid_size) {
  const Eigen::ArrayXd u = midpoint_grid(I, grid_size);
  double m = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    try {
      m = std::max(m, std::abs(evaluate(f_n, u[i])));
    } catch (const DomainError&) {
    }
  }
  return 1e-8 * (1.0 + m);
}

WorkingInterval find_working_interval(const Expr& f_n, const Interval& I, double margin,
                                      int grid_size) {
  if (grid_size < 32) throw SpecError("grid_size must be at least 32");
  if (!(margin > 0.0)) throw SpecError("margin must be positive");
  if (!(I.lo < I.hi)) throw SpecError("interval must satisfy lo < hi");

  const Eigen::ArrayXd u = midpoint_grid(I, grid_size);
  std::vector<int> s(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) s[static_cast<std::size_t>(i)] = margin_sign(f_n, u[i], margin);

  std::vector<Run> runs;
  const auto count = static_cast<Eigen::Index>(s.size());
  for (Eigen::Index i = 0; i < count;) {
    const int sg = s[static_cast<std::size_t>(i)];
    if (sg == 0) {
      ++i;
      continue;
    }
    Eigen::Index j = i;
    while (j + 1 < count && s[static_cast<std::size_t>(j + 1)] == sg) ++j;

    Run r;
    r.sign = sg;
    r.count = j - i + 1;
    if (i == 0)
      r.range.lo = margin_sign(f_n, I.lo, margin) == sg ? I.lo : refine(f_n, I.lo, u[0], sg, margin);
    else
      r.range.lo = refine(f_n, u[i - 1], u[i], sg, margin);
    if (j == count - 1)
      r.range.hi = margin_sign(f_n, I.hi, margin) == sg ? I.hi : refine(f_n, I.hi, u[j], sg, margin);
    else
      r.range.hi = refine(f_n, u[j + 1], u[j], sg, margin);
    try {
      r.mid_value = std::abs(evaluate(f_n, r.range.mid()));
    } catch (const DomainError&) {
      r.mid_value = 0.0;
    }
    runs.push_back(r);
    i = j + 1;
  }
  if (runs.empty())
    throw NoIntervalError("|f_n| is below the margin everywhere on the sampled interval");

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const Run& a = runs[k];
    const Run& b = runs[best];
    if (a.count != b.count) {
      if (a.count > b.count) best = k;
      continue;
    }
    const double scale = std::max(a.mid_value, b.mid_value);
    if (std::abs(a.mid_value - b.mid_value) > 1e-12 * scale) {
      if (a.mid_value > b.mid_value) best = k;
      continue;
    }
    best = k;  // runs are ordered by u, so the later one is higher
  }

  WorkingInterval wi;
  wi.U = runs[best].range;
  wi.epsilon = runs[best].sign;
  for (std::size_t k = 0; k < runs.size(); ++k)
    if (k != best) wi.unanalyzed.push_back(runs[k].range);
  return wi;
}

Expr build_Fprime(const Expr& f_n, int n, int epsilon) {
  if (n < 2) throw SpecError("build_Fprime needs n >= 2");
  return pow(Expr(static_cast<double>(epsilon)) * f_n, Expr(1.0 / static_cast<double>(n - 1)));
}

CumulativeF cumulative_F(const Expr& Fprime, const Interval& U, double c, double tol, int cells,
                         int max_depth) {
  auto integrand = [Fprime](double x) { return evaluate(Fprime, x); };
  CumulativeF F;
  F.table = std::make_shared<const CumulativeTable>(integrand, U, cells, tol, max_depth);
  F.offset = c;
  return F;
}

double StructureFunctions::F(double u) const {
  if (exact_F) return evaluate(*exact_F, u);
  return Fnum(u);
}

Eigen::ArrayXd StructureFunctions::F(const Eigen::ArrayXd& u) const {
  Eigen::ArrayXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = F(u[i]);
  return out;
}

StructureFunctions StructureFunctions::with_offset(double c) const {
  StructureFunctions s = *this;
  s.offset_c = c;
  s.Fnum.offset = c;
  const double Fmid = s.F(U.mid());
  s.signs.nu = Fmid >= 0 ? 1 : -1;
  return s;
}

StructureFunctions build_structure(const ProblemSpec& problem, const WorkingInterval& wi,
                                   double quad_tol, int cells, int max_depth) {
  StructureFunctions sf;
  sf.n = problem.n;
  sf.U = wi.U;
  sf.signs.epsilon = wi.epsilon;
  sf.Fprime = build_Fprime(problem.coefficient(problem.n), problem.n, wi.epsilon);
  sf.Fsecond = differentiate(sf.Fprime);
  sf.Fthird = differentiate(sf.Fsecond);
  sf.Fnum = cumulative_F(sf.Fprime, wi.U, 0.0, quad_tol, cells, max_depth);
  return sf;
}

StructureFunctions structure_from_F(int n, const Expr& F, const Interval& U, int epsilon) {
  StructureFunctions sf;
  sf.n = n;
  sf.U = U;
  sf.exact_F = F;
  sf.Fprime = differentiate(F);
  sf.Fsecond = differentiate(sf.Fprime);
  sf.Fthird = differentiate(sf.Fsecond);
  sf.signs.epsilon = epsilon;
  sf.signs.nu = evaluate(F, U.mid()) >= 0 ? 1 : -1;
  return sf;
}

GTriple<double> g_and_derivatives(const StructureFunctions& sf, double u) {
  return g_from_F(sf.n, sf.F(u), evaluate(sf.Fprime, u), evaluate(sf.Fsecond, u),
                  evaluate(sf.Fthird, u));
}

GTriple<Eigen::ArrayXd> g_and_derivatives(const StructureFunctions& sf, const Eigen::ArrayXd& u) {
  const Eigen::ArrayXd F = sf.F(u);
  const Eigen::ArrayXd Fp = evaluate(sf.Fprime, u);
  if ((Fp == 0.0).any()) throw DomainError("F' vanishes on the grid");
  return g_from_F<Eigen::ArrayXd>(sf.n, F, Fp, evaluate(sf.Fsecond, u), evaluate(sf.Fthird, u));
}

CoefficientSamples sample_coefficients(const ProblemSpec& problem, const Eigen::ArrayXd& u) {
  CoefficientSamples s;
  s.n = problem.n;
  s.u = u;
  for (int k = 0; k <= problem.n; ++k) {
    const Expr& fk = problem.f[static_cast<std::size_t>(k)];
    s.f.push_back(evaluate(fk, u));
    s.df.push_back(evaluate(differentiate(fk), u));
  }
  return s;
}

GridFn a_of_u(const Expr& f_n, const Expr& f_nm1, const StructureFunctions& sf,
              const Eigen::ArrayXd& grid) {
  CoefficientSamples s;
  s.n = sf.n;
  s.u = grid;
  s.f.assign(static_cast<std::size_t>(sf.n + 1), Eigen::ArrayXd::Zero(grid.size()));
  s.df = s.f;
  s.f[static_cast<std::size_t>(sf.n)] = evaluate(f_n, grid);
  s.df[static_cast<std::size_t>(sf.n)] = evaluate(differentiate(f_n), grid);
  s.f[static_cast<std::size_t>(sf.n - 1)] = evaluate(f_nm1, grid);
  s.df[static_cast<std::size_t>(sf.n - 1)] = evaluate(differentiate(f_nm1), grid);
  return {grid, a_pointwise(s, g_and_derivatives(sf, grid))};
}

// ---------------------------------------------------------------------------
// Offset search

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class OffsetObjective {
 public:
  OffsetObjective(const StructureFunctions& base, const CoefficientSamples& samples)
      : n_(base.n), samples_(samples) {
    Fbase_ = base.F(samples.u);
    Fp_ = evaluate(base.Fprime, samples.u);
    Fpp_ = evaluate(base.Fsecond, samples.u);
    Fppp_ = evaluate(base.Fthird, samples.u);
    scale_ = 1.0 + samples.max_abs_f();
  }

  bool admissible(double c) const {
    const Eigen::ArrayXd F = Fbase_ + c;
    return (F > 0.0).all() || (F < 0.0).all();
  }

  GTriple<Eigen::ArrayXd> g(double c) const {
    const Eigen::ArrayXd F = Fbase_ + c;
    return g_from_F<Eigen::ArrayXd>(n_, F, Fp_, Fpp_, Fppp_);
  }

  // Normalized spread of a(u); also reports the mean.
  double spread(double c, double* mean = nullptr) const {
    if (!admissible(c)) return kInf;
    const Eigen::ArrayXd a = a_pointwise(samples_, g(c));
    if (!a.allFinite()) return kInf;
    const double m = a.mean();
    if (mean) *mean = m;
    return (a.maxCoeff() - a.minCoeff()) / (1.0 + std::abs(m));
  }

  // Normalized worst residual of the u'^0 .. u'^{n-1} equations at a = mean a(u).
  double residual(double c, double* mean = nullptr) const {
    if (!admissible(c)) return kInf;
    const auto gt = g(c);
    const Eigen::ArrayXd a = a_pointwise(samples_, gt);
    if (!a.allFinite()) return kInf;
    const double m = a.mean();
    if (mean) *mean = m;
    const auto R = determining_residuals(samples_, gt, m);
    double worst = 0.0;
    for (int k = 0; k < n_; ++k) worst = std::max(worst, R[static_cast<std::size_t>(k)].abs().maxCoeff());
    return worst / scale_;
  }

 private:
  int n_;
  const CoefficientSamples& samples_;
  Eigen::ArrayXd Fbase_, Fp_, Fpp_, Fppp_;
  double scale_ = 1.0;
};

template <class F>
double golden_section(const F& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

OffsetSearch search_offsets(const ProblemSpec& problem, const StructureFunctions& base,
                            const CoefficientSamples& samples, const OffsetConfig& cfg) {
  (void)problem;
  OffsetObjective objective(base, samples);

  OffsetSearch out;
  out.span = std::abs(base.F(base.U.hi) - base.F(base.U.lo));
  const Interval range =
      cfg.range.value_or(Interval{-cfg.range_factor * out.span, cfg.range_factor * out.span});
  const Eigen::ArrayXd seeds = Eigen::ArrayXd::LinSpaced(cfg.seeds, range.lo, range.hi);

  Eigen::ArrayXd spread(seeds.size());
  for (Eigen::Index i = 0; i < seeds.size(); ++i) spread[i] = objective.spread(seeds[i]);

  const auto admissible = spread.isFinite();
  if (!admissible.any()) return out;
  bool all_flat = true;
  for (Eigen::Index i = 0; i < seeds.size(); ++i)
    if (admissible[i] && spread[i] > cfg.tol_const) all_flat = false;
  out.fallback = all_flat;

  auto obj = [&](double c) { return out.fallback ? objective.residual(c) : objective.spread(c); };
  const double tol = out.fallback ? cfg.residual_tol : cfg.tol_const;
  Eigen::ArrayXd vals = out.fallback ? Eigen::ArrayXd(seeds.unaryExpr(obj)) : spread;

  auto consider = [&](double c, double value) {
    double mean = 0.0;
    if (out.fallback)
      objective.residual(c, &mean);
    else
      objective.spread(c, &mean);
    OffsetCandidate cand{c, mean, value};
    if (!out.best || value < out.best->objective) out.best = cand;
    if (value <= tol) out.passing.push_back(cand);
  };

  const Eigen::Index m = seeds.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!std::isfinite(vals[i])) continue;
    const bool left_ok = i == 0 || !(vals[i - 1] < vals[i]);
    const bool right_ok = i == m - 1 || !(vals[i + 1] < vals[i]);
    const bool plateau_tail = i > 0 && vals[i - 1] == vals[i];
    if (vals[i] <= tol) consider(seeds[i], vals[i]);
    if (!left_ok || !right_ok || plateau_tail) continue;
    const double lo = seeds[std::max<Eigen::Index>(i - 1, 0)];
    const double hi = seeds[std::min<Eigen::Index>(i + 1, m - 1)];
    const double c = golden_section(obj, lo, hi);
    const double v = obj(c);
    if (std::isfinite(v)) consider(c, v);
  }

  std::sort(out.passing.begin(), out.passing.end(),
            [](const OffsetCandidate& a, const OffsetCandidate& b) { return a.objective < b.objective; });
  return out;
}

UniquenessResult uniqueness_probe(std::vector<double> offsets, double merge_tol) {
  UniquenessResult r;
  for (double c : offsets) {
    const bool merged = std::any_of(r.offsets.begin(), r.offsets.end(),
                                    [&](double rep) { return std::abs(rep - c) <= merge_tol; });
    if (!merged) r.offsets.push_back(c);
  }
  r.ok = r.offsets.size() == 1;
  return r;
}

double solve_offset(const ProblemSpec& problem, const StructureFunctions& base,
                    const CoefficientSamples& samples, const OffsetConfig& cfg) {
  const OffsetSearch search = search_offsets(problem, base, samples, cfg);
  if (search.passing.empty()) throw NoConstantA("no offset in the search range makes a constant");
  std::vector<double> cs;
  for (const auto& p : search.passing) cs.push_back(p.c);
  const UniquenessResult probe = uniqueness_probe(cs, 1e-6 * search.span);
  if (!probe.ok) throw AmbiguousOffset(probe.offsets, "several distinct offsets pass");
  return probe.offsets.front();
}

}  // namespace lienard
