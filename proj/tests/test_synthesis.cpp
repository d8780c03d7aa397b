#include <doctest.h>

#include <cmath>
#include <random>

#include "lienard/synthesis.hpp"
#include "oracles.hpp"

using namespace lienard;

namespace {

SynthesisSpec golden_spec() {
  SynthesisSpec s;
  s.n = 4;
  s.F = parse("u");
  s.U = {0.5, 2.0};
  s.b = {0, 0, 0, 0};
  s.a = 1.0;
  return s;
}

}  // namespace

TEST_CASE("forced leading constant") {
  CHECK(forced_bn(4, 1) == doctest::Approx(8.0 / 27.0).epsilon(1e-15));
  CHECK(forced_bn(5, -1) == doctest::Approx(-std::pow(3.0 / 4.0, 4)).epsilon(1e-15));
  CHECK(full_b(golden_spec()).size() == 5);
}

TEST_CASE("golden coefficients") {
  const ProblemSpec p = synthesize(golden_spec()).problem;
  for (double u : {0.5, 0.77, 1.3, 2.0}) {
    CAPTURE(u);
    CHECK(oracle::close(evaluate(p.f[4], u), 1.0, 1e-12));
    CHECK(oracle::close(evaluate(p.f[3], u), -8.0 / 3.0 * u, 1e-12));
    CHECK(oracle::close(evaluate(p.f[2], u), 8.0 / 3.0 * u * u + 1.0 / u, 1e-12));
    CHECK(oracle::close(evaluate(p.f[1], u), -32.0 / 27.0 * u * u * u - 1.0, 1e-12));
    CHECK(oracle::close(evaluate(p.f[0], u), 16.0 / 81.0 * std::pow(u, 4) + 2.0 / 3.0 * u, 1e-12));
  }
  CHECK(to_string(p.f[4]) == "1");
}

TEST_CASE("closed-form A_k satisfies its differential recursion") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const SynthesisSpec s = oracle::random_spec(rng);
    CAPTURE(to_string(s.F));
    CAPTURE(s.n);
    const RecursionCheck rc = check_A_recursion(s, build_A(s), midpoint_grid(s.U, 128));
    CHECK(rc.max_scaled <= 1e-9);
  }
}

TEST_CASE("A_k against a direct sum") {
  SynthesisSpec s = golden_spec();
  s.n = 5;
  s.F = parse("u + 1");
  s.U = {0.1, 3.0};
  s.b = {0.5, -1.0, 0.25, 2.0, -0.75};
  s.a = 0.5;
  const std::vector<Expr> A = build_A(s);
  const std::vector<double> b = full_b(s);
  auto choose = [](int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  for (double u : {0.2, 1.5, 2.9}) {
    const double F = u + 1;
    for (int k = 0; k <= 5; ++k) {
      double direct = 0;
      for (int i = 1; i <= 5 - k; ++i)
        direct += std::pow(-1.0, i) * choose(k + i, i) * std::pow(0.5, i) * b[static_cast<std::size_t>(k + i)] *
                  std::pow(F, i * 4.0 / 3.0);
      CHECK(oracle::close(evaluate(A[static_cast<std::size_t>(k)], u), direct, 1e-13));
    }
  }
}

TEST_CASE("B_k for positive F reduces to the simpler form") {
  SynthesisSpec s = golden_spec();
  s.b = {0.3, 0.7, -1.1, 0.4};
  s.a = -0.5;
  const AuxFunctions aux = build_aux(s);
  for (double u : {0.6, 1.7}) {
    const double F = u;
    CHECK(oracle::close(evaluate(aux.B[2], u), evaluate(aux.A[2], u), 1e-14));
    CHECK(oracle::close(evaluate(aux.B[1], u), evaluate(aux.A[1], u) + 0.5 * std::pow(F, 1.5), 1e-14));
    CHECK(oracle::close(evaluate(aux.B[0], u), evaluate(aux.A[0], u) + 0.25 * std::pow(F, 3.0), 1e-14));
  }
}

TEST_CASE("homogeneous specialization matches the direct a = 0 solution") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 20) {
    SynthesisSpec s = oracle::random_spec(rng);
    s.a = 0.0;
    const ProblemSpec p = synthesize(s).problem;
    const std::vector<double> b = full_b(s);
    const Expr Fp = differentiate(s.F);
    const Expr Fpp = differentiate(Fp);
    const double n = s.n;
    for (double u : {s.U.lo + 0.1 * s.U.width(), s.U.mid(), s.U.hi - 0.05 * s.U.width()}) {
      const double F = evaluate(s.F, u), dF = evaluate(Fp, u), ddF = evaluate(Fpp, u);
      const double g = (n - 2) * F / ((n - 1) * dF);
      const double gp = (n - 2) / (n - 1) * (1 - F * ddF / (dF * dF));
      for (int k = 0; k <= s.n; ++k) {
        double expect;
        if (k == 2)
          expect = (gp + b[2]) / g;
        else
          expect = b[static_cast<std::size_t>(k)] * std::pow(std::abs(g), 1 - k) *
                   std::pow(std::abs(F), (k - 2) * (n - 1) / (n - 2));
        CAPTURE(k);
        CHECK(oracle::close(evaluate(p.f[static_cast<std::size_t>(k)], u), expect, 1e-12));
      }
    }
    ++checked;
  }
}

TEST_CASE("homogeneous kernel") {
  SynthesisSpec s = golden_spec();
  s.F = parse("u^2");
  for (double u : {0.6, 1.9}) {
    // ((n-1)/(n-2))^{k-1} |F|^{(k-n)/(n-2)} F'^{k-1} with n = 4, k = 3
    CHECK(oracle::close(evaluate(homogeneous_kernel(s, 3), u), 2.25 * std::pow(u * u, -0.5) * 4 * u * u, 1e-13));
  }
}

TEST_CASE("spec validation") {
  SynthesisSpec s = golden_spec();
  s.n = 3;
  s.b = {0, 0, 0};
  CHECK_THROWS_AS(synthesize(s), SpecError);
  s = golden_spec();
  s.n = 21;
  s.b.assign(21, 0.0);
  CHECK_THROWS_AS(synthesize(s), SpecError);
  s = golden_spec();
  s.b = {0, 0};
  CHECK_THROWS_AS(synthesize(s), SpecError);
  s = golden_spec();
  s.F = parse("-u");
  CHECK_THROWS_AS(synthesize(s), SpecError);  // F' < 0
  s = golden_spec();
  s.F = parse("u - 1");
  CHECK_THROWS_AS(synthesize(s), SpecError);  // F vanishes inside U
  s = golden_spec();
  s.nu = -1;
  CHECK_THROWS_AS(synthesize(s), SpecError);  // sign of F disagrees with nu
  s = golden_spec();
  s.epsilon = 2;
  CHECK_THROWS_AS(synthesize(s), SpecError);
  s = golden_spec();
  s.F = parse("ln(u - 1)");
  CHECK_THROWS_AS(synthesize(s), SpecError);
}

TEST_CASE("spec hash") {
  const SynthesisSpec s = golden_spec();
  CHECK(spec_hash(s) == spec_hash(golden_spec()));
  SynthesisSpec t = s;
  t.a = 0.5;
  CHECK(spec_hash(t) != spec_hash(s));
  CHECK(spec_hash_hex(s).size() == 16);
}

TEST_CASE("expected report") {
  const SynthesisResult r = synthesize(golden_spec());
  CHECK(r.expected.dimension == 2);
  CHECK(*r.expected.a == 1.0);
  CHECK(*r.expected.offset_c == 0.5);
  REQUIRE(r.expected.generator2);
  CHECK(r.expected.generator2->kind == GeneratorKind::Exponential);
  SynthesisSpec h = golden_spec();
  h.a = 0.0;
  CHECK(synthesize(h).expected.generator2->kind == GeneratorKind::Scaling);
}

TEST_CASE("largest supported order") {
  SynthesisSpec s;
  s.n = 20;
  s.F = parse("u + 1");
  s.U = {0.1, 3.0};
  s.a = 0.5;
  s.b.assign(20, 0.1);
  const SynthesisResult r = synthesize(s);
  CHECK(r.problem.f.size() == 21);
  const RecursionCheck rc = check_A_recursion(s, r.aux.A, midpoint_grid(s.U, 64));
  CHECK(rc.max_scaled <= 1e-9);
}
