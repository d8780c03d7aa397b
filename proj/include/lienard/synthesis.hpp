#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lienard/classify.hpp"
#include "lienard/expr.hpp"
#include "lienard/interval.hpp"
#include "lienard/problem.hpp"

namespace lienard {

/// Inputs of the constructive inverse: F on U, free constants b_0..b_{n-1},
/// the constant a, and the signs of f_n and F.
struct SynthesisSpec {
  int n = 4;
  Expr F;
  Interval U;
  std::vector<double> b;  // b_0 .. b_{n-1}; b_n is forced
  double a = 0.0;
  int epsilon = 1;
  int nu = 1;
};

constexpr int kMaxSynthesisOrder = 20;

/// b_n = epsilon ((n-1)/(n-2))^{1-n}.
double forced_bn(int n, int epsilon);

/// b_0..b_n with the forced last entry.
std::vector<double> full_b(const SynthesisSpec& spec);

/// Throws SpecError unless 4 <= n <= 20, b has n entries, the signs are
/// +-1, and F' > 0, nu F > 0 at every sample of U.
void validate(const SynthesisSpec& spec, int samples = 1024);

/// sum_j coef_j |F|^{num_j / (n-2)}
struct FPowerTerm {
  long double coef = 0.0L;
  int num = 0;
};
using FPowerSum = std::vector<FPowerTerm>;

/// Expression for a power sum, with |F| written as abs(F).
Expr to_expr(const FPowerSum& sum, const Expr& F, int n);

struct AuxFunctions {
  std::vector<FPowerSum> A_terms;
  std::vector<FPowerSum> B_terms;
  std::vector<Expr> A;  // A_0 .. A_n, A_n = 0
  std::vector<Expr> B;  // B_0 .. B_n
};

/// Closed-form A_k = sum_{i=1}^{n-k} (-nu)^i C(k+i, i) a^i b_{k+i} |F|^{i(n-1)/(n-2)}.
std::vector<FPowerSum> build_A_terms(const SynthesisSpec& spec);
std::vector<Expr> build_A(const SynthesisSpec& spec);

struct RecursionCheck {
  double max_abs = 0.0;
  /// max |lhs - rhs| / max(1, |rhs|)
  double max_scaled = 0.0;
};

/// Compares the symbolic derivative of each A_k with
///   -(k+1) a ((n-1)/(n-2)) |F|^{1/(n-2)} F' (b_{k+1} + A_{k+1})
/// on `grid`.
RecursionCheck check_A_recursion(const SynthesisSpec& spec, const std::vector<Expr>& A,
                                 const Eigen::ArrayXd& grid);

std::vector<FPowerSum> build_B_terms(const SynthesisSpec& spec, const std::vector<FPowerSum>& A);
AuxFunctions build_aux(const SynthesisSpec& spec);

/// f_k = (b_k + B_k) ((n-1)/(n-2))^{k-1} |F|^{(k-n)/(n-2)} F'^{k-1}  (k != 2)
/// f_2 = (b_2 + B_2) ((n-1)/(n-2)) F'/F + F'/F - F''/F'
ProblemSpec build_f(const SynthesisSpec& spec, const AuxFunctions& aux);

/// Homogeneous kernel h_k = ((n-1)/(n-2))^{k-1} |F|^{(k-n)/(n-2)} F'^{k-1}.
Expr homogeneous_kernel(const SynthesisSpec& spec, int k);

/// 64-bit FNV-1a hash of the canonical text of the spec.
std::uint64_t spec_hash(const SynthesisSpec& spec);
std::string spec_hash_hex(const SynthesisSpec& spec);

struct SynthesisResult {
  ProblemSpec problem;
  SymmetryReport expected;
  AuxFunctions aux;
  std::string hash;
};

/// Builds f_0..f_n from the spec together with the report `classify`
/// is expected to return for them.
SynthesisResult synthesize(const SynthesisSpec& spec);

}  // namespace lienard
