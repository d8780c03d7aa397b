#include "lienard/synthesis.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace lienard {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

long double ratio(int n) { return static_cast<long double>(n - 1) / static_cast<long double>(n - 2); }

long double ipow(long double x, int e) {
  long double r = 1.0L;
  const bool neg = e < 0;
  for (int i = 0; i < std::abs(e); ++i) r *= x;
  return neg ? 1.0L / r : r;
}

// Sums coefficients of equal exponents and drops zeros.
FPowerSum normalize(const FPowerSum& s) {
  std::map<int, long double> acc;
  for (const auto& t : s) acc[t.num] += t.coef;
  FPowerSum out;
  for (const auto& [num, coef] : acc)
    if (coef != 0.0L) out.push_back({coef, num});
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double forced_bn(int n, int epsilon) {
  return static_cast<double>(static_cast<long double>(epsilon) * ipow(ratio(n), 1 - n));
}

std::vector<double> full_b(const SynthesisSpec& spec) {
  std::vector<double> b = spec.b;
  b.resize(static_cast<std::size_t>(spec.n));
  b.push_back(forced_bn(spec.n, spec.epsilon));
  return b;
}

void validate(const SynthesisSpec& spec, int samples) {
  if (spec.n < 4 || spec.n > kMaxSynthesisOrder)
    throw SpecError("synthesis needs 4 <= n <= " + std::to_string(kMaxSynthesisOrder));
  if (spec.b.size() != static_cast<std::size_t>(spec.n))
    throw SpecError("b must list b_0 .. b_{n-1} (" + std::to_string(spec.n) + " values)");
  if (std::abs(spec.epsilon) != 1 || std::abs(spec.nu) != 1)
    throw SpecError("epsilon and nu must be +1 or -1");
  if (!(spec.U.lo < spec.U.hi)) throw SpecError("interval must satisfy lo < hi");
  const Expr Fp = differentiate(spec.F);
  const Eigen::ArrayXd u = midpoint_grid(spec.U, samples);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double F = 0.0, dF = 0.0;
    try {
      F = evaluate(spec.F, u[i]);
      dF = evaluate(Fp, u[i]);
    } catch (const DomainError& e) {
      throw SpecError("F is not evaluable at u = " + num(u[i]) + ": " + e.what());
    }
    if (!(dF > 0.0)) throw SpecError("F' must be positive on U; F'(" + num(u[i]) + ") = " + num(dF));
    if (!(spec.nu * F > 0.0))
      throw SpecError("nu * F must be positive on U; F(" + num(u[i]) + ") = " + num(F));
  }
}

Expr to_expr(const FPowerSum& sum, const Expr& F, int n) {
  const Expr absF = abs(F);
  Expr out(0.0);
  for (const auto& t : sum) {
    const double exponent = static_cast<double>(t.num) / static_cast<double>(n - 2);
    out = out + Expr(static_cast<double>(t.coef)) * pow(absF, Expr(exponent));
  }
  return out;
}

std::vector<FPowerSum> build_A_terms(const SynthesisSpec& spec) {
  const int n = spec.n;
  const std::vector<double> b = full_b(spec);
  std::vector<FPowerSum> A(static_cast<std::size_t>(n + 1));
  for (int k = 0; k < n; ++k) {
    FPowerSum s;
    for (int i = 1; i <= n - k; ++i) {
      const long double coef = ipow(-static_cast<long double>(spec.nu), i) *
                               static_cast<long double>(binomial(k + i, i)) *
                               ipow(static_cast<long double>(spec.a), i) *
                               static_cast<long double>(b[static_cast<std::size_t>(k + i)]);
      s.push_back({coef, i * (n - 1)});
    }
    A[static_cast<std::size_t>(k)] = normalize(s);
  }
  return A;
}

std::vector<Expr> build_A(const SynthesisSpec& spec) {
  std::vector<Expr> out;
  for (const auto& s : build_A_terms(spec)) out.push_back(to_expr(s, spec.F, spec.n));
  return out;
}

RecursionCheck check_A_recursion(const SynthesisSpec& spec, const std::vector<Expr>& A,
                                 const Eigen::ArrayXd& grid) {
  const int n = spec.n;
  const std::vector<double> b = full_b(spec);
  const Expr Fp = differentiate(spec.F);
  const double r = static_cast<double>(n - 1) / static_cast<double>(n - 2);
  const Expr common =
      Expr(spec.a * r) * pow(abs(spec.F), Expr(1.0 / static_cast<double>(n - 2))) * Fp;

  RecursionCheck out;
  for (int k = 0; k < n; ++k) {
    const Expr lhs = differentiate(A[static_cast<std::size_t>(k)]);
    const Expr rhs = Expr(-static_cast<double>(k + 1)) * common *
                     (Expr(b[static_cast<std::size_t>(k + 1)]) + A[static_cast<std::size_t>(k + 1)]);
    const Eigen::ArrayXd L = evaluate(lhs, grid);
    const Eigen::ArrayXd R = evaluate(rhs, grid);
    const Eigen::ArrayXd diff = (L - R).abs();
    out.max_abs = std::max(out.max_abs, diff.maxCoeff());
    out.max_scaled = std::max(out.max_scaled, (diff / R.abs().max(1.0)).maxCoeff());
  }
  return out;
}

std::vector<FPowerSum> build_B_terms(const SynthesisSpec& spec, const std::vector<FPowerSum>& A) {
  const int n = spec.n;
  const long double a = spec.a;
  const long double nu = spec.nu;
  const long double b2 = spec.b[2];
  std::vector<FPowerSum> B = A;
  B[static_cast<std::size_t>(n)].clear();
  for (auto& t : B[2]) t.coef *= nu;

  FPowerSum b1 = A[1];
  b1.push_back({-a * (2.0L * b2 * (1.0L - nu) + 1.0L), n - 1});
  B[1] = normalize(b1);

  FPowerSum b0 = A[0];
  b0.push_back({a * a * (1.0L + b2 * (1.0L - nu)) * nu, 2 * (n - 1)});
  B[0] = normalize(b0);
  return B;
}

AuxFunctions build_aux(const SynthesisSpec& spec) {
  AuxFunctions aux;
  aux.A_terms = build_A_terms(spec);
  aux.B_terms = build_B_terms(spec, aux.A_terms);
  for (const auto& s : aux.A_terms) aux.A.push_back(to_expr(s, spec.F, spec.n));
  for (const auto& s : aux.B_terms) aux.B.push_back(to_expr(s, spec.F, spec.n));
  return aux;
}

ProblemSpec build_f(const SynthesisSpec& spec, const AuxFunctions& aux) {
  const int n = spec.n;
  const std::vector<double> b = full_b(spec);
  const Expr Fp = differentiate(spec.F);
  const Expr Fpp = differentiate(Fp);

  ProblemSpec p;
  p.n = n;
  p.I = spec.U;
  for (int k = 0; k <= n; ++k) {
    // b_k + B_k as one power sum
    FPowerSum s = aux.B_terms[static_cast<std::size_t>(k)];
    s.push_back({static_cast<long double>(b[static_cast<std::size_t>(k)]), 0});
    s = normalize(s);

    if (k == 2) {
      for (auto& t : s) t.coef *= ratio(n);
      const Expr FpOverF = Fp / spec.F;
      p.f.push_back(to_expr(s, spec.F, n) * FpOverF + FpOverF - Fpp / Fp);
      continue;
    }
    for (auto& t : s) {
      t.coef *= ipow(ratio(n), k - 1);
      t.num += k - n;
    }
    p.f.push_back(pow(Fp, Expr(static_cast<double>(k - 1))) * to_expr(normalize(s), spec.F, n));
  }
  return p;
}

Expr homogeneous_kernel(const SynthesisSpec& spec, int k) {
  const int n = spec.n;
  const FPowerSum s{{ipow(ratio(n), k - 1), k - n}};
  return pow(differentiate(spec.F), Expr(static_cast<double>(k - 1))) * to_expr(s, spec.F, n);
}

std::uint64_t spec_hash(const SynthesisSpec& spec) {
  std::string text = "n=" + std::to_string(spec.n) + ";F=" + to_string(spec.F) + ";U=" +
                     num(spec.U.lo) + "," + num(spec.U.hi) + ";a=" + num(spec.a) + ";b=";
  for (double v : spec.b) text += num(v) + ",";
  text += ";eps=" + std::to_string(spec.epsilon) + ";nu=" + std::to_string(spec.nu);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string spec_hash_hex(const SynthesisSpec& spec) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(spec_hash(spec)));
  return buf;
}

SynthesisResult synthesize(const SynthesisSpec& spec) {
  validate(spec);
  SynthesisResult out;
  out.aux = build_aux(spec);
  out.problem = build_f(spec, out.aux);
  out.hash = spec_hash_hex(spec);

  SymmetryReport& r = out.expected;
  r.n = spec.n;
  r.dimension = 2;
  r.a = spec.a;
  r.U = spec.U;
  r.signs = {spec.epsilon, spec.nu};
  try {
    r.offset_c = evaluate(spec.F, spec.U.lo);
  } catch (const DomainError&) {
  }
  GeneratorDescription gen;
  if (spec.a == 0.0) {
    gen.kind = GeneratorKind::Scaling;
    gen.xi = "t";
    gen.eta = "g(u)";
  } else {
    gen.kind = GeneratorKind::Exponential;
    gen.a = spec.a;
    gen.xi = "exp(" + num(spec.a) + "*t)";
    gen.eta = num(spec.a) + "*exp(" + num(spec.a) + "*t)*g(u)";
  }
  r.generator2 = gen;
  const double k = static_cast<double>(spec.n - 2) / static_cast<double>(spec.n - 1);
  r.g_description = "g(u) = " + num(k) + " * F(u) / F'(u), F(u) = " + to_string(spec.F);
  r.structure = std::make_shared<const StructureFunctions>(structure_from_F(spec.n, spec.F, spec.U, spec.epsilon));
  r.verdict = "two-dimensional symmetry algebra (by construction)";
  return out;
}

}  // namespace lienard
