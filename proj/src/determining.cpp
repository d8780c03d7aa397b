#include "lienard/determining.hpp"

#include "lienard/errors.hpp"

namespace lienard {

double CoefficientSamples::max_abs_f() const {
  double m = 0.0;
  for (const auto& fk : f)
    if (fk.size()) m = std::max(m, fk.abs().maxCoeff());
  return m;
}

std::vector<Eigen::ArrayXd> determining_residuals(const CoefficientSamples& s,
                                                  const GTriple<Eigen::ArrayXd>& g, double a) {
  const int n = s.n;
  const Eigen::Index m = s.u.size();
  auto f = [&](int k) -> Eigen::ArrayXd {
    return (k < 0 || k > n) ? Eigen::ArrayXd::Zero(m) : s.fk(k);
  };
  auto df = [&](int k) -> Eigen::ArrayXd {
    return (k < 0 || k > n) ? Eigen::ArrayXd::Zero(m) : s.dfk(k);
  };

  std::vector<Eigen::ArrayXd> R(static_cast<std::size_t>(n + 1));
  R[0] = -a * a * g.g + df(0) * g.g + a * f(1) * g.g - f(0) * g.gp + 2.0 * f(0);
  R[1] = a * (1.0 - 2.0 * g.gp) + df(1) * g.g + 2.0 * a * f(2) * g.g + f(1);
  R[2] = -g.gpp + df(2) * g.g + 3.0 * a * f(3) * g.g + f(2) * g.gp;
  for (int k = 3; k <= n; ++k)
    R[static_cast<std::size_t>(k)] = df(k) * g.g + (k + 1) * a * f(k + 1) * g.g +
                                     (k - 1) * f(k) * g.gp + (2 - k) * f(k);
  return R;
}

std::vector<Eigen::ArrayXd> homogeneous_residuals(const CoefficientSamples& s,
                                                  const GTriple<Eigen::ArrayXd>& g) {
  std::vector<Eigen::ArrayXd> R(static_cast<std::size_t>(s.n + 1));
  for (int k = 0; k <= s.n; ++k) {
    if (k == 2)
      R[2] = -g.gpp + s.dfk(2) * g.g + s.fk(2) * g.gp;
    else
      R[static_cast<std::size_t>(k)] =
          s.dfk(k) * g.g + (k - 1) * s.fk(k) * g.gp + (2 - k) * s.fk(k);
  }
  return R;
}

Eigen::ArrayXd a_pointwise(const CoefficientSamples& s, const GTriple<Eigen::ArrayXd>& g) {
  const int n = s.n;
  const Eigen::ArrayXd denom = n * s.fk(n) * g.g;
  if ((denom == 0.0).any()) throw DomainError("f_n * g vanishes on the grid");
  return -(s.dfk(n - 1) * g.g + (n - 2) * s.fk(n - 1) * g.gp + (3 - n) * s.fk(n - 1)) / denom;
}

}  // namespace lienard
