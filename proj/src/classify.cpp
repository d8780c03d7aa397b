#include "lienard/classify.hpp"

#include <cmath>
#include <cstdio>

namespace lienard {

void ProblemSpec::validate() const {
  if (n < 0) throw SpecError("n must be non-negative");
  if (f.size() != static_cast<std::size_t>(n + 1))
    throw SpecError("expected " + std::to_string(n + 1) + " coefficient functions f0..f" +
                    std::to_string(n) + ", got " + std::to_string(f.size()));
  if (!(I.lo < I.hi)) throw SpecError("interval must satisfy lo < hi");
}

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Translation:
      return "translation";
    case GeneratorKind::Scaling:
      return "scaling";
    case GeneratorKind::Exponential:
      return "exponential";
    case GeneratorKind::Custom:
      return "custom";
  }
  return "custom";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "translation") return GeneratorKind::Translation;
  if (s == "scaling") return GeneratorKind::Scaling;
  if (s == "exponential") return GeneratorKind::Exponential;
  if (s == "custom") return GeneratorKind::Custom;
  throw SpecError("unknown generator kind '" + s + "'");
}

ResidualSystem residuals_system(const ProblemSpec& problem, const StructureFunctions& sf, double a,
                                const Eigen::ArrayXd& grid) {
  const CoefficientSamples s = sample_coefficients(problem, grid);
  return {grid, determining_residuals(s, g_and_derivatives(sf, grid), a)};
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string describe_g(const StructureFunctions& sf) {
  const double k = static_cast<double>(sf.n - 2) / static_cast<double>(sf.n - 1);
  std::string s = "g(u) = " + num(k) + " * F(u) / F'(u), F'(u) = " + to_string(sf.Fprime);
  if (sf.exact_F)
    s += ", F(u) = " + to_string(*sf.exact_F);
  else
    s += ", F(u) = " + num(sf.offset_c) + " + integral of F' from " + num(sf.U.lo) + " to u";
  return s;
}

void check_n(const ProblemSpec& problem) {
  if (problem.n == 3)
    throw NMustBeAtLeast4(
        "n = 3 is an open problem: the u'^4 coefficient vanishes identically, so xi_u = 0 cannot "
        "be concluded and the cubic case is not classified; this test requires n >= 4");
  if (problem.n < 4)
    throw NMustBeAtLeast4("n = " + std::to_string(problem.n) +
                          " is outside this classification; it requires n >= 4");
}

// Fills residuals, dimension and generator for a fixed structure and a.
void assess(const ProblemSpec& problem, const StructureFunctions& sf,
            const CoefficientSamples& samples, double a, const Config& cfg, SymmetryReport& r) {
  const auto g = g_and_derivatives(sf, samples.u);
  const auto R = determining_residuals(samples, g, a);
  r.threshold = cfg.residual_tol * (1.0 + samples.max_abs_f());
  r.residuals.clear();
  bool all = true;
  for (int k = 0; k < problem.n; ++k) {
    const double m = R[static_cast<std::size_t>(k)].abs().maxCoeff();
    const bool ok = m <= r.threshold;
    all = all && ok;
    r.residuals.push_back({k, m, ok});
  }
  const double top = R[static_cast<std::size_t>(problem.n)].abs().maxCoeff();
  r.top_equation = EquationResidual{problem.n, top, top <= r.threshold};
  all = all && r.top_equation->passed;

  r.structure = std::make_shared<const StructureFunctions>(sf);
  r.signs = sf.signs;
  r.offset_c = sf.offset_c;
  r.a = a;
  r.grid = samples.u;
  r.residual_grid = R;
  r.a_grid = a_pointwise(samples, g);
  r.a_spread = r.a_grid.maxCoeff() - r.a_grid.minCoeff();
  r.g_description = describe_g(sf);

  if (!all) {
    r.dimension = 1;
    r.generator2.reset();
    r.verdict = "determining equations fail; the algebra is spanned by d/dt";
    return;
  }
  r.dimension = 2;
  GeneratorDescription gen;
  if (std::abs(a) <= cfg.a_zero_tol) {
    gen.kind = GeneratorKind::Scaling;
    gen.a = 0.0;
    gen.xi = "t";
    gen.eta = "g(u)";
  } else {
    gen.kind = GeneratorKind::Exponential;
    gen.a = a;
    gen.xi = "exp(" + num(a) + "*t)";
    gen.eta = num(a) + "*exp(" + num(a) + "*t)*g(u)";
  }
  r.generator2 = gen;
  r.verdict = "two-dimensional symmetry algebra";
}

}  // namespace

SymmetryReport classify(const ProblemSpec& problem, const Config& cfg) {
  check_n(problem);
  problem.validate();

  const Expr& fn = problem.coefficient(problem.n);
  const double margin = cfg.margin > 0 ? cfg.margin : default_margin(fn, problem.I, cfg.grid_size);
  const WorkingInterval wi = find_working_interval(fn, problem.I, margin, cfg.grid_size);
  const StructureFunctions base =
      build_structure(problem, wi, cfg.quad_tol, cfg.grid_size, cfg.quad_max_depth);
  const CoefficientSamples samples = sample_coefficients(problem, midpoint_grid(wi.U, cfg.grid_size));

  OffsetConfig oc;
  oc.seeds = cfg.offset_seeds;
  oc.range_factor = cfg.offset_range_factor;
  oc.range = cfg.offset_range;
  oc.tol_const = cfg.tol_const;
  oc.residual_tol = cfg.residual_tol;
  const OffsetSearch search = search_offsets(problem, base, samples, oc);

  SymmetryReport report;
  report.n = problem.n;
  report.U = wi.U;
  report.unanalyzed = wi.unanalyzed;
  report.offset_fallback = search.fallback;
  report.signs.epsilon = wi.epsilon;

  // Every candidate that clears the full residual system.
  std::vector<double> passing;
  std::vector<SymmetryReport> passing_reports;
  for (const auto& cand : search.passing) {
    SymmetryReport r = report;
    assess(problem, base.with_offset(cand.c), samples, cand.a, cfg, r);
    if (r.dimension == 2) {
      passing.push_back(cand.c);
      passing_reports.push_back(std::move(r));
    }
  }

  if (!passing.empty()) {
    const UniquenessResult probe = uniqueness_probe(passing, cfg.merge_rel * search.span);
    if (!probe.ok)
      throw AmbiguousOffset(probe.offsets,
                            "distinct offsets of F satisfy every condition; F is not unique here, "
                            "which the uniqueness of F rules out, so no generator is emitted");
    return passing_reports.front();
  }

  if (search.best) {
    assess(problem, base.with_offset(search.best->c), samples, search.best->a, cfg, report);
    report.dimension = 1;
    report.generator2.reset();
    report.verdict = search.passing.empty()
                         ? (search.fallback ? "no offset of F satisfies the determining equations"
                                            : "no offset of F makes a constant")
                         : "determining equations fail; the algebra is spanned by d/dt";
  } else {
    report.verdict = "no offset keeps F sign-definite on U";
  }
  return report;
}

SymmetryReport classify_with_F(const ProblemSpec& problem, const Expr& F, const Interval& U,
                               const Config& cfg) {
  check_n(problem);
  problem.validate();
  const Expr& fn = problem.coefficient(problem.n);
  const int eps = evaluate(fn, U.mid()) > 0 ? 1 : -1;
  const StructureFunctions sf = structure_from_F(problem.n, F, U, eps);
  const CoefficientSamples samples = sample_coefficients(problem, midpoint_grid(U, cfg.grid_size));

  SymmetryReport report;
  report.n = problem.n;
  report.U = U;
  const Eigen::ArrayXd a = a_pointwise(samples, g_and_derivatives(sf, samples.u));
  assess(problem, sf, samples, a.mean(), cfg, report);
  report.offset_c.reset();
  if (report.dimension == 2 && (a.maxCoeff() - a.minCoeff()) > cfg.tol_const * (1.0 + std::abs(a.mean()))) {
    report.dimension = 1;
    report.generator2.reset();
    report.verdict = "a is not constant for the given F";
  }
  return report;
}

}  // namespace lienard
