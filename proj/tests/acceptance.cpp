// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "lienard/classify.hpp"
#include "lienard/io.hpp"
#include "lienard/synthesis.hpp"
#include "lienard/verify.hpp"
#include "oracles.hpp"

using namespace lienard;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) detail << "first failure: " << what << "; ";
    passed = passed && ok;
  }
};

ProblemSpec problem(int n, const Interval& I, std::vector<const char*> f) {
  ProblemSpec p;
  p.n = n;
  p.I = I;
  for (const char* s : f) p.f.push_back(parse(s));
  return p;
}

double worst_residual(const SymmetryReport& r) {
  double w = 0.0;
  for (const auto& e : r.residuals) w = std::max(w, e.max_abs);
  return w;
}

bool all_residuals_pass(const SymmetryReport& r, const ProblemSpec& p, const Config& cfg) {
  const CoefficientSamples s = sample_coefficients(p, midpoint_grid(r.U, cfg.grid_size));
  const double bound = cfg.residual_tol * (1.0 + s.max_abs_f());
  for (const auto& e : r.residuals)
    if (!(e.max_abs <= bound)) return false;
  return true;
}

// Round trip of 100 random specs through synthesis and classification.
void ac1(Outcome& o) {
  const Config cfg;
  std::mt19937_64 rng(20240101);
  const auto start = std::chrono::steady_clock::now();
  double worst_da = 0.0;
  int passed = 0;
  for (int i = 0; i < 100; ++i) {
    const SynthesisSpec s = oracle::random_spec(rng);
    const ProblemSpec p = synthesize(s).problem;
    const SymmetryReport r = classify(p, cfg);
    const double da = r.a ? std::abs(*r.a - s.a) : INFINITY;
    worst_da = std::max(worst_da, da);
    const bool ok = r.dimension == 2 && da <= 1e-6 && all_residuals_pass(r, p, cfg);
    o.require(ok, "spec " + std::to_string(i) + " (" + to_string(s.F) + ", n=" + std::to_string(s.n) + ")");
    passed += ok;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs <= 60.0, "runtime");
  o.detail << passed << "/100 dimension 2, max |da| = " << worst_da << ", " << secs << " s";
}

// Perturbed families lose the second generator.
void ac2(Outcome& o) {
  std::mt19937_64 rng(777);
  int rejected = 0, scaled_f3 = 0;
  double smallest = INFINITY;
  for (int i = 0; i < 50; ++i) {
    const SynthesisSpec s = oracle::random_spec(rng);
    ProblemSpec p = synthesize(s).problem;
    // For a = 0 scaling f_3 only rescales b_3, which is still integrable.
    if (i % 2 == 1 && s.a != 0.0 && s.b[3] != 0.0) {
      p.f[3] = Expr(1.1) * p.f[3];
      ++scaled_f3;
    } else {
      p.f[0] = p.f[0] + Expr(0.1) * pow(Expr::variable(), Expr(3.0));
    }
    const SymmetryReport r = classify(p);
    const double w = worst_residual(r);
    smallest = std::min(smallest, w);
    const bool ok = r.dimension == 1 && w >= 1e-3;
    o.require(ok, "family " + std::to_string(i));
    rejected += ok;
  }
  o.detail << rejected << "/50 rejected (" << scaled_f3 << " by scaling f3), smallest worst residual " << smallest;
}

// Golden family written out by hand.
void ac3(Outcome& o) {
  SynthesisSpec s;
  s.n = 4;
  s.F = parse("u");
  s.U = {0.5, 2.0};
  s.b = {0, 0, 0, 0};
  s.a = 1.0;
  const ProblemSpec p = synthesize(s).problem;
  const ProblemSpec hand =
      problem(4, {0.5, 2.0}, {"16/81*u^4 + 2/3*u", "-32/27*u^3 - 1", "8/3*u^2 + 1/u", "-8/3*u", "1"});
  double worst = 0.0;
  for (double u : closed_grid({0.5, 2.0}, 301))
    for (int k = 0; k <= 4; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const double want = evaluate(hand.f[i], u);
      worst = std::max(worst, std::abs(evaluate(p.f[i], u) - want) / std::max(1.0, std::abs(want)));
    }
  o.require(worst <= 1e-12, "coefficients");

  const SymmetryReport r = classify(p);
  o.require(r.dimension == 2, "dimension");
  o.require(r.a && std::abs(*r.a - 1.0) <= 1e-6, "a");
  o.require(r.generator2 && r.generator2->kind == GeneratorKind::Exponential, "generator kind");
  const SymmetryReport rh = classify(hand);
  o.require(rh.dimension == 2, "hand-entered problem");

  const Config cfg;
  const Generator X = exponential_generator(rh.structure, *rh.a);
  const double res = prolongation_residual(X, hand, jet_box(rh.U, cfg, 4)).max_abs;
  o.require(res <= 1e-9, "prolongation residual");
  // g = 2u/3 from the recovered structure
  double gerr = 0.0;
  for (double u : {0.6, 1.0, 1.5, 1.9}) gerr = std::max(gerr, std::abs(g_and_derivatives(*rh.structure, u).g - 2 * u / 3));
  o.require(gerr <= 1e-8, "g = 2u/3");
  o.detail << "coefficient error " << worst << ", prolongation residual " << res << ", |g - 2u/3| " << gerr;
}

// Closed-form A_k against its differential recursion.
void ac4(Outcome& o) {
  std::mt19937_64 rng(4242);
  double worst = 0.0, worst_abs = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SynthesisSpec s = oracle::random_spec(rng);
    const RecursionCheck rc = check_A_recursion(s, build_A(s), midpoint_grid(s.U, 256));
    worst = std::max(worst, rc.max_scaled);
    worst_abs = std::max(worst_abs, rc.max_abs);
    o.require(rc.max_scaled <= 1e-9, "spec " + std::to_string(i));
  }
  o.detail << "max |lhs - rhs| / max(1, |rhs|) = " << worst << " (absolute " << worst_abs << ")";
}

// a = 0: direct formulas and the homogeneous residual system.
void ac5(Outcome& o) {
  std::mt19937_64 rng(55);
  double worst_f = 0.0, worst_sys = 0.0;
  for (int i = 0; i < 40; ++i) {
    SynthesisSpec s = oracle::random_spec(rng);
    s.a = 0.0;
    const ProblemSpec p = synthesize(s).problem;
    const std::vector<double> b = full_b(s);
    const Expr Fp = differentiate(s.F), Fpp = differentiate(Fp);
    const double n = s.n;
    for (double u : midpoint_grid(s.U, 17)) {
      const double F = evaluate(s.F, u), dF = evaluate(Fp, u), ddF = evaluate(Fpp, u);
      const double g = (n - 2) * F / ((n - 1) * dF);
      const double gp = (n - 2) / (n - 1) * (1 - F * ddF / (dF * dF));
      for (int k = 0; k <= s.n; ++k) {
        const auto ik = static_cast<std::size_t>(k);
        const double want = k == 2 ? (gp + b[2]) / g
                                   : b[ik] * std::pow(std::abs(g), 1 - k) * std::pow(std::abs(F), (k - 2) * (n - 1) / (n - 2));
        const double d = std::abs(evaluate(p.f[ik], u) - want) / std::max(1.0, std::abs(want));
        worst_f = std::max(worst_f, d);
      }
    }

    // The residual systems must agree on any coefficients, so perturb half of them.
    ProblemSpec q = p;
    if (i % 2) q.f[1] = q.f[1] + parse("sin(u)");
    const StructureFunctions sf = structure_from_F(s.n, s.F, s.U, s.epsilon);
    const Eigen::ArrayXd grid = midpoint_grid(s.U, 64);
    const CoefficientSamples cs = sample_coefficients(q, grid);
    const auto g = g_and_derivatives(sf, grid);
    const auto R = determining_residuals(cs, g, 0.0);
    const auto H = homogeneous_residuals(cs, g);
    for (int k = 0; k <= s.n; ++k) {
      const auto ik = static_cast<std::size_t>(k);
      const double d = ((R[ik] - H[ik]).abs() / (1.0 + H[ik].abs())).maxCoeff();
      worst_sys = std::max(worst_sys, d);
    }
  }
  o.require(worst_f <= 1e-12, "direct formulas");
  o.require(worst_sys <= 1e-12, "residual systems");
  o.detail << "max relative coefficient error " << worst_f << ", system mismatch " << worst_sys;
}

// The scalar condition, its per-power split and the classifier's equations agree.
void ac6(Outcome& o) {
  std::mt19937_64 rng(66);
  double worst = 0.0;
  bool translation_zero = true;
  const std::vector<double> ts = {0.0, 0.4, 1.0};
  const std::vector<double> vs = {-1.7, -0.3, 0.6, 1.9};
  for (int i = 0; i < 30; ++i) {
    const SynthesisSpec s = oracle::random_spec(rng);
    ProblemSpec p = synthesize(s).problem;
    if (i % 2) p.f[0] = p.f[0] + parse("0.1*u^3");
    auto sf = std::make_shared<const StructureFunctions>(structure_from_F(s.n, s.F, s.U, s.epsilon));
    const double a = s.a;
    const Generator X = a == 0.0 ? scaling_generator(sf) : exponential_generator(sf, a);
    const Eigen::ArrayXd u = midpoint_grid(s.U.inner(0.8), 9);
    const CoefficientSamples cs = sample_coefficients(p, u);
    const auto R = determining_residuals(cs, g_and_derivatives(*sf, u), a);
    const Eigen::ArrayXd t = Eigen::Map<const Eigen::ArrayXd>(ts.data(), 3);
    const CoefficientResiduals cr = coefficient_residuals(X, p, t, u);
    for (Eigen::Index it = 0; it < t.size(); ++it)
      for (Eigen::Index iu = 0; iu < u.size(); ++iu) {
        // xi_t divided by e^{at}: a for the exponential field, 1 for t d/dt
        const double scale = a == 0.0 ? 1.0 : a;
        const double ea = std::exp(a * t[it]);
        const std::vector<double> c = condition_coefficients(X, p, t[it], u[iu]);
        for (int k = 0; k <= s.n; ++k) {
          const auto ik = static_cast<std::size_t>(k);
          const double classifier = scale * R[ik][iu];
          const double split = cr.R[ik](it, iu) / ea;
          const double expanded = c[ik] / ea;
          const double ref = std::max(1.0, std::abs(expanded));
          worst = std::max({worst, std::abs(classifier - expanded) / ref, std::abs(split - expanded) / ref});
        }
        for (double v : vs) {
          const JetPoint pt{t[it], u[iu], v};
          const std::span<const JetPoint> one(&pt, 1);
          const double scalar = prolongation_residual(X, p, one).max_abs / ea;
          double sum = 0.0;
          for (int k = s.n; k >= 0; --k) sum = sum * v + scale * R[static_cast<std::size_t>(k)][iu];
          worst = std::max(worst, std::abs(scalar - std::abs(sum)) / std::max(1.0, scalar));
          const ConditionResidual tr = prolongation_residual(translation_generator(), p, one);
          translation_zero = translation_zero && tr.max_abs == 0.0;
        }
      }
  }
  o.require(worst <= 1e-9, "agreement");
  o.require(translation_zero, "d/dt residual");
  o.detail << "max relative disagreement " << worst << ", d/dt residual exactly 0: " << (translation_zero ? "yes" : "no");
}

// Integrator accuracy and symmetry flows.
void ac7(Outcome& o) {
  const ProblemSpec osc = problem(1, {-10.0, 10.0}, {"-u", "0"});
  auto error = [&](double h) {
    const Trajectory tr = integrate(osc, 0.0, 1.0, 0.0, 2 * std::numbers::pi, h);
    double e = 0.0;
    for (Eigen::Index i = 0; i < tr.t.size(); ++i) e = std::max(e, std::abs(tr.u[i] - std::cos(tr.t[i])));
    return e;
  };
  const double e3 = error(1e-3), e1 = error(1e-2), e2 = error(5e-3);
  o.require(e3 <= 1e-9, "period error at h = 1e-3");
  o.require(e1 / e2 >= 14.0, "order");

  std::vector<SynthesisSpec> specs;
  {
    SynthesisSpec s;
    s.n = 4;
    s.F = parse("u");
    s.U = {0.5, 2.0};
    s.b = {0, 0, 0, 0};
    s.a = 1.0;
    specs.push_back(s);
    s.F = parse("u + 1");
    s.U = {0.1, 3.0};
    s.b = {0.3, -0.2, 0.5, 0.1};
    s.a = 0.0;
    specs.push_back(s);
    s.n = 5;
    s.F = parse("exp(u)");
    s.U = {-1.0, 1.0};
    s.b = {0.2, 0.4, -0.3, 0.1, 0.0};
    s.a = -0.5;
    specs.push_back(s);
  }
  double worst_sym = 0.0, weakest_control = INFINITY;
  for (const SynthesisSpec& s : specs) {
    const ProblemSpec p = synthesize(s).problem;
    const SymmetryReport r = classify(p);
    o.require(r.dimension == 2, "family classified");
    if (r.dimension != 2) continue;
    const double u0 = s.U.mid();
    const Trajectory tr = integrate(p, 0.0, u0, 0.0, 0.5, 1e-3, r.U);
    o.require(tr.stop == StopReason::Completed,
              "base trajectory for F = " + to_string(s.F) + " stopped: " + to_string(tr.stop));
    const Generator X = std::abs(*r.a) < Config{}.a_zero_tol ? scaling_generator(r.structure)
                                                                             : exponential_generator(r.structure, *r.a);
    for (double sp : {0.1, -0.1}) {
      const double res = ode_residual(p, flow_transform(X, tr, sp)).max_abs();
      worst_sym = std::max(worst_sym, res);
    }
    const Generator control = custom_generator(parse("0", true), parse("u^2", true));
    weakest_control = std::min(weakest_control, ode_residual(p, flow_transform(control, tr, 0.1)).max_abs());
  }
  o.require(worst_sym <= 1e-4, "symmetry flow residual");
  o.require(weakest_control >= 1e-2, "control flow residual");
  o.detail << "period error " << e3 << ", halving ratio " << e1 / e2 << ", symmetry flow residual " << worst_sym
           << ", control residual >= " << weakest_control;
}

// Guards for n = 3, f_n = 0 and ambiguous offsets.
void ac8(Outcome& o) {
  try {
    classify(problem(3, {0.5, 2.0}, {"0", "u", "0", "1"}));
    o.require(false, "n = 3 accepted");
  } catch (const NMustBeAtLeast4& e) {
    o.require(std::string(e.what()).find("open problem") != std::string::npos, "n = 3 message");
  }
  try {
    classify(problem(5, {0.5, 2.0}, {"u", "1", "0", "u^2", "0", "0"}));
    o.require(false, "f_n = 0 accepted");
  } catch (const NoIntervalError&) {
  }
  try {
    classify(problem(4, {0.5, 2.0}, {"0", "0", "0", "0", "1"}));
    o.require(false, "ambiguous offset resolved silently");
  } catch (const AmbiguousOffset& e) {
    const io::Json j = io::ambiguous_to_json(e, 4);
    o.require(j["status"] == "ambiguous_offset" && j["offset_count"].get<std::size_t>() > 1, "ambiguous report");
    o.detail << "ambiguous case reports " << e.offsets.size() << " offsets";
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"AC1 round trip", ac1},        {"AC2 perturbations", ac2}, {"AC3 golden family", ac3},
      {"AC4 A_k recursion", ac4},     {"AC5 homogeneous case", ac5}, {"AC6 formula paths", ac6},
      {"AC7 dynamics", ac7},          {"AC8 guards", ac8},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "exception: " << e.what();
    }
    std::printf("[%s] %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
