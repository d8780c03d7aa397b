#pragma once

#include <Eigen/Core>

namespace lienard {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo < x && x < hi; }

  /// Sub-interval keeping the central `fraction` of the width.
  Interval inner(double fraction) const {
    const double pad = 0.5 * (1.0 - fraction) * width();
    return {lo + pad, hi - pad};
  }
};

/// `count` uniformly spaced cell midpoints of `I`; never touches the endpoints.
inline Eigen::ArrayXd midpoint_grid(const Interval& I, Eigen::Index count) {
  const double h = I.width() / static_cast<double>(count);
  return I.lo + h * (Eigen::ArrayXd::LinSpaced(count, 0.0, static_cast<double>(count - 1)) + 0.5);
}

/// `count` uniformly spaced points including both endpoints.
inline Eigen::ArrayXd closed_grid(const Interval& I, Eigen::Index count) {
  return Eigen::ArrayXd::LinSpaced(count, I.lo, I.hi);
}

/// Sampled function on a strictly increasing grid.
struct GridFn {
  Eigen::ArrayXd u;
  Eigen::ArrayXd v;

  double spread() const { return v.size() ? v.maxCoeff() - v.minCoeff() : 0.0; }
  double mean() const { return v.size() ? v.mean() : 0.0; }
  double max_abs() const { return v.size() ? v.abs().maxCoeff() : 0.0; }
};

}  // namespace lienard
