#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lienard/determining.hpp"
#include "lienard/expr.hpp"
#include "lienard/interval.hpp"
#include "lienard/problem.hpp"
#include "lienard/quadrature.hpp"

namespace lienard {

/// epsilon = sign of f_n on U, nu = sign of F on U.
struct SignPair {
  int epsilon = 1;
  int nu = 1;
};

struct WorkingInterval {
  Interval U;
  int epsilon = 1;
  /// Other maximal sub-intervals where |f_n| clears the margin; not analyzed.
  std::vector<Interval> unanalyzed;
};

/// 1e-8 * (1 + max sampled |f_n|) over `grid_size` midpoints of I.
double default_margin(const Expr& f_n, const Interval& I, int grid_size = 1024);

/// Largest sampled sub-interval of I on which |f_n| >= margin with constant
/// sign. Boundaries falling inside I are refined by bisection. Ties go to the
/// larger |f_n| at the midpoint, then to higher u.
WorkingInterval find_working_interval(const Expr& f_n, const Interval& I, double margin,
                                      int grid_size = 1024);

/// F' = (epsilon f_n)^{1/(n-1)}.
Expr build_Fprime(const Expr& f_n, int n, int epsilon);

/// F(u) = c + integral of F' from lo(U) to u.
struct CumulativeF {
  std::shared_ptr<const CumulativeTable> table;
  double offset = 0.0;

  double operator()(double u) const { return offset + (*table)(u); }
};

CumulativeF cumulative_F(const Expr& Fprime, const Interval& U, double c, double tol = 1e-10,
                         int cells = 1024, int max_depth = 40);

/// F', F'', F''' as exact expressions and F either as a quadrature table
/// plus offset, or as an exact expression when one is known.
struct StructureFunctions {
  int n = 4;
  Expr Fprime;
  Expr Fsecond;
  Expr Fthird;
  CumulativeF Fnum;
  std::optional<Expr> exact_F;
  double offset_c = 0.0;
  Interval U;
  SignPair signs;

  double F(double u) const;
  double Fp(double u) const { return evaluate(Fprime, u); }
  Eigen::ArrayXd F(const Eigen::ArrayXd& u) const;

  /// Copy with a different integration offset (table path only).
  StructureFunctions with_offset(double c) const;
};

/// Builds F' from f_n and its cumulative table; offset 0, nu undetermined.
StructureFunctions build_structure(const ProblemSpec& problem, const WorkingInterval& wi,
                                   double quad_tol = 1e-10, int cells = 1024, int max_depth = 40);

/// Structure from a known F (exact path). Checks F' against |f_n|^{1/(n-1)}
/// is the caller's business; signs are read off F and f_n at the midpoint.
StructureFunctions structure_from_F(int n, const Expr& F, const Interval& U, int epsilon);

GTriple<double> g_and_derivatives(const StructureFunctions& sf, double u);
GTriple<Eigen::ArrayXd> g_and_derivatives(const StructureFunctions& sf, const Eigen::ArrayXd& u);

/// f_k and f_k' sampled on `u`.
CoefficientSamples sample_coefficients(const ProblemSpec& problem, const Eigen::ArrayXd& u);

/// Right side of the formula for a, sampled on `grid`.
GridFn a_of_u(const Expr& f_n, const Expr& f_nm1, const StructureFunctions& sf,
              const Eigen::ArrayXd& grid);

struct OffsetConfig {
  int seeds = 512;
  double range_factor = 10.0;
  std::optional<Interval> range;  // overrides [-range_factor*span, +range_factor*span]
  double tol_const = 1e-6;
  double residual_tol = 1e-6;
};

struct OffsetCandidate {
  double c = 0.0;
  double a = 0.0;
  /// spread(a)/(1+|mean a|) normally; max residual/(1+max|f_k|) in fallback mode.
  double objective = 0.0;
};

struct OffsetSearch {
  std::vector<OffsetCandidate> passing;
  std::optional<OffsetCandidate> best;  // absent when no offset keeps F sign-definite
  /// The spread of a was within tolerance at every admissible seed, so the
  /// offset was pinned by the full residual system instead.
  bool fallback = false;
  double span = 0.0;
};

/// Scans offsets c, polishes local minima by golden-section search and
/// returns every polished or sampled offset that passes its tolerance.
OffsetSearch search_offsets(const ProblemSpec& problem, const StructureFunctions& base,
                            const CoefficientSamples& samples, const OffsetConfig& cfg = {});

/// Single offset making a constant; NoConstantA when none passes and
/// AmbiguousOffset when distinct offsets pass.
double solve_offset(const ProblemSpec& problem, const StructureFunctions& base,
                    const CoefficientSamples& samples, const OffsetConfig& cfg = {});

/// Merges offsets closer than `merge_tol`; ok when one cluster remains.
struct UniquenessResult {
  bool ok = false;
  std::vector<double> offsets;
};
UniquenessResult uniqueness_probe(std::vector<double> offsets, double merge_tol);

}  // namespace lienard
