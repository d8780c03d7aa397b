#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Core>

#include "lienard/errors.hpp"
#include "lienard/interval.hpp"

namespace lienard {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // Below this floor the difference is rounding noise, not truncation error.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right);
  if (std::abs(delta) <= 15.0 * std::max(tol, floor)) return left + right + delta / 15.0;
  if (depth >= max_depth) throw QuadratureError("adaptive Simpson exceeded the depth limit");
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance
/// `tol`. Throws QuadratureError when refinement goes deeper than `max_depth`.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

/// Running integral of an integrand from `lo`: nodes at uniform spacing
/// carry cumulative values, and in-between points are completed with one
/// more adaptive pass from the nearest node at or below them.
class CumulativeTable {
 public:
  CumulativeTable() = default;
  CumulativeTable(std::function<double(double)> integrand, const Interval& range, int cells,
                  double tol = 1e-10, int max_depth = 40);

  double operator()(double u) const;
  const Eigen::ArrayXd& nodes() const { return nodes_; }
  const Eigen::ArrayXd& values() const { return values_; }
  const Interval& range() const { return range_; }
  double total() const { return values_.size() ? values_[values_.size() - 1] : 0.0; }

 private:
  std::function<double(double)> integrand_;
  Interval range_;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd values_;
  double tol_ = 1e-10;
  int max_depth_ = 40;
};

}  // namespace lienard
