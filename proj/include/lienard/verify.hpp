#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lienard/classify.hpp"
#include "lienard/config.hpp"
#include "lienard/expr.hpp"
#include "lienard/interval.hpp"
#include "lienard/problem.hpp"
#include "lienard/structure.hpp"

namespace lienard {

/// xi, eta and their partials up to second order at one (t, u).
struct GeneratorJet {
  double xi = 0, xi_t = 0, xi_u = 0, xi_tt = 0, xi_tu = 0, xi_uu = 0;
  double eta = 0, eta_t = 0, eta_u = 0, eta_tt = 0, eta_tu = 0, eta_uu = 0;
};

/// X = xi(t,u) d/dt + eta(t,u) d/du.
struct Generator {
  GeneratorKind kind = GeneratorKind::Custom;
  double a = 0.0;
  bool xi_u_zero = false;
  std::string xi_text;
  std::string eta_text;
  std::function<GeneratorJet(double t, double u)> jet;
};

Generator translation_generator();
Generator scaling_generator(std::shared_ptr<const StructureFunctions> sf);
Generator exponential_generator(std::shared_ptr<const StructureFunctions> sf, double a);

/// Generator from expressions in t and u; partials are taken symbolically.
Generator custom_generator(const Expr& xi, const Expr& eta);

/// Generator from plain callables; partials by central differences with
/// steps h (1 + |t|) and h (1 + |u|).
Generator finite_difference_generator(std::function<double(double, double)> xi,
                                      std::function<double(double, double)> eta, double h = 1e-5);

struct JetPoint {
  double t = 0, u = 0, udot = 0;
};

/// Tensor grid: jet_t_points in t, jet_u_points over the inner jet_u_fraction
/// of U, and max(jet_udot_points, n + 3) Chebyshev nodes in udot.
std::vector<JetPoint> jet_box(const Interval& U, const Config& cfg, int n);
std::vector<JetPoint> jet_box(const Interval& t, const Interval& u, double udot_max, int t_points,
                              int u_points, int udot_points);

/// Coefficients of udot^0 .. udot^{n+1} in the symmetry condition at (t, u).
std::vector<double> condition_coefficients(const Generator& X, const ProblemSpec& problem,
                                           double t, double u);

struct ConditionResidual {
  double max_abs = 0.0;
  /// max over points of |value| / (1 + sum of |terms|)
  double max_normalized = 0.0;
  JetPoint worst;
};

/// Symmetry condition as a polynomial in udot, evaluated on the points.
ConditionResidual prolongation_residual(const Generator& X, const ProblemSpec& problem,
                                        std::span<const JetPoint> points);

/// Same condition written as X^(2)(u'' - Phi) restricted to solutions,
/// built from Phi, its partials and the total derivative. Independent of
/// the coefficient expansion above.
ConditionResidual bracket_residual(const Generator& X, const ProblemSpec& problem,
                                   std::span<const JetPoint> points);

/// Refits the polynomial in udot through Chebyshev samples of the bracket
/// form and returns the largest coefficient mismatch against the expansion,
/// relative to 1 + the largest coefficient. Degree n+1 is fitted on
/// max(n + 3, samples) nodes.
double coefficient_fit_mismatch(const Generator& X, const ProblemSpec& problem, double t, double u,
                                double udot_max = 2.0, int samples = 9);

/// Per-power determining equations for generators with xi_u = 0: entry k
/// holds the udot^k coefficient on the (t x u) grid.
struct CoefficientResiduals {
  Eigen::ArrayXd t;
  Eigen::ArrayXd u;
  std::vector<Eigen::ArrayXXd> R;  // R[k](i_t, i_u)
  double max_abs(int k) const { return R[static_cast<std::size_t>(k)].abs().maxCoeff(); }
};
CoefficientResiduals coefficient_residuals(const Generator& X, const ProblemSpec& problem,
                                           const Eigen::ArrayXd& t, const Eigen::ArrayXd& u);

enum class StopReason { Completed, LeftDomain, BlowUp, DomainError };
const char* to_string(StopReason r);

struct Trajectory {
  Eigen::ArrayXd t;
  Eigen::ArrayXd u;
  Eigen::ArrayXd udot;
  double h = 0.0;
  StopReason stop = StopReason::Completed;
  std::string method = "rk4";
};

constexpr double kBlowUp = 1e12;

/// Classical RK4 with ceil((t_end - t0)/h) equal steps. Stops early when u
/// leaves (lo + margin, hi - margin), when |u| or |udot| exceeds 1e12, or
/// when a coefficient cannot be evaluated.
Trajectory integrate(const ProblemSpec& problem, double t0, double u0, double v0, double t_end,
                     double h, std::optional<Interval> domain = std::nullopt, double margin = 0.0);

/// Right-hand side sum_k f_k(u) udot^k.
double rhs(const ProblemSpec& problem, double u, double udot);

/// Pushes a sampled solution along the flow of X for parameter s (|s| <= 1)
/// and resamples on a uniform t grid with the same number of points.
/// Tangents are carried with the flow, so the resampling is cubic Hermite
/// with exact slopes. Throws NonMonotoneImage when the image is not a graph
/// over t.
Trajectory flow_transform(const Generator& X, const Trajectory& traj, double s);

/// u'' - Phi(u, u') by central differences at the interior samples.
GridFn ode_residual(const ProblemSpec& problem, const Trajectory& traj);

}  // namespace lienard
