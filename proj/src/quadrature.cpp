#include "lienard/quadrature.hpp"

#include <algorithm>

namespace lienard {

CumulativeTable::CumulativeTable(std::function<double(double)> integrand, const Interval& range,
                                 int cells, double tol, int max_depth)
    : integrand_(std::move(integrand)), range_(range), tol_(tol), max_depth_(max_depth) {
  nodes_ = closed_grid(range, cells + 1);
  values_.resize(nodes_.size());
  values_[0] = 0.0;
  for (Eigen::Index i = 1; i < nodes_.size(); ++i)
    values_[i] = values_[i - 1] +
                 adaptive_simpson(integrand_, nodes_[i - 1], nodes_[i], tol_, max_depth_);
}

double CumulativeTable::operator()(double u) const {
  if (u <= range_.lo) return -adaptive_simpson(integrand_, u, range_.lo, tol_, max_depth_);
  if (u >= range_.hi) return total() + adaptive_simpson(integrand_, range_.hi, u, tol_, max_depth_);
  const double h = range_.width() / static_cast<double>(nodes_.size() - 1);
  auto i = static_cast<Eigen::Index>((u - range_.lo) / h);
  i = std::clamp<Eigen::Index>(i, 0, nodes_.size() - 2);
  if (u == nodes_[i]) return values_[i];
  return values_[i] + adaptive_simpson(integrand_, nodes_[i], u, tol_, max_depth_);
}

}  // namespace lienard
