#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lienard/config.hpp"
#include "lienard/problem.hpp"
#include "lienard/structure.hpp"

namespace lienard {

enum class GeneratorKind { Translation, Scaling, Exponential, Custom };

const char* to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& s);

/// Human-readable generator xi d/dt + eta d/du.
struct GeneratorDescription {
  GeneratorKind kind = GeneratorKind::Translation;
  double a = 0.0;
  std::string xi = "1";
  std::string eta = "0";
};

struct EquationResidual {
  int power = 0;  // exponent of u' whose coefficient this is
  double max_abs = 0.0;
  bool passed = false;
};

/// Outcome of the dimension test.
struct SymmetryReport {
  int n = 0;
  int dimension = 1;
  std::optional<double> a;
  /// Offset of F; for dimension 1 this is the best-fitting offset, if any.
  std::optional<double> offset_c;
  std::optional<double> a_spread;
  GeneratorDescription generator1;
  std::optional<GeneratorDescription> generator2;
  std::vector<EquationResidual> residuals;  // powers 0 .. n-1
  std::optional<EquationResidual> top_equation;  // power n, holds by construction of F
  double threshold = 0.0;
  Interval U;
  SignPair signs;
  std::vector<Interval> unanalyzed;
  bool offset_fallback = false;
  std::string g_description;
  std::string verdict;

  // Not serialized.
  std::shared_ptr<const StructureFunctions> structure;
  Eigen::ArrayXd grid;
  Eigen::ArrayXd a_grid;
  std::vector<Eigen::ArrayXd> residual_grid;
};

/// Residual grids of the u'^k equations (k = 0..n), divided by xi_t.
struct ResidualSystem {
  Eigen::ArrayXd u;
  std::vector<Eigen::ArrayXd> R;

  double max_abs(int k) const { return R[static_cast<std::size_t>(k)].abs().maxCoeff(); }
};

ResidualSystem residuals_system(const ProblemSpec& problem, const StructureFunctions& sf, double a,
                                const Eigen::ArrayXd& grid);

/// Decides whether the symmetry algebra is two-dimensional and, if so,
/// emits the second generator. Throws NMustBeAtLeast4, NoIntervalError and
/// AmbiguousOffset.
SymmetryReport classify(const ProblemSpec& problem, const Config& cfg = {});

/// Same test with F given in closed form on U; no offset search.
SymmetryReport classify_with_F(const ProblemSpec& problem, const Expr& F, const Interval& U,
                               const Config& cfg = {});

}  // namespace lienard
