#pragma once

#include <vector>

#include <Eigen/Core>

namespace lienard {

/// g = (n-2) F / ((n-1) F') with its first two u-derivatives, written in
/// terms of F, F', F'', F'''. Works for scalars and Eigen arrays alike.
template <class T>
struct GTriple {
  T g;
  T gp;
  T gpp;
};

template <class T>
GTriple<T> g_from_F(int n, const T& F, const T& Fp, const T& Fpp, const T& Fppp) {
  const double k = static_cast<double>(n - 2) / static_cast<double>(n - 1);
  GTriple<T> r;
  r.g = k * F / Fp;
  r.gp = k * (1.0 - F * Fpp / (Fp * Fp));
  r.gpp = -k * ((Fp * Fpp + F * Fppp) / (Fp * Fp) - 2.0 * F * Fpp * Fpp / (Fp * Fp * Fp));
  return r;
}

/// Pointwise samples of f_k and f_k' (k = 0..n) on a grid.
struct CoefficientSamples {
  int n = 0;
  Eigen::ArrayXd u;
  std::vector<Eigen::ArrayXd> f;
  std::vector<Eigen::ArrayXd> df;

  const Eigen::ArrayXd& fk(int k) const { return f[static_cast<std::size_t>(k)]; }
  const Eigen::ArrayXd& dfk(int k) const { return df[static_cast<std::size_t>(k)]; }
  /// max_k max_u |f_k(u)|
  double max_abs_f() const;
};

/// Residuals of the reduced determining equations for eta = g(u) xi_t(t),
/// xi_t = e^{at}, divided by xi_t. Entry k (0 <= k <= n-1) is the
/// u'^k equation; entry n is the u'^n equation, which holds identically
/// whenever F' = |f_n|^{1/(n-1)} and serves as a bookkeeping check.
std::vector<Eigen::ArrayXd> determining_residuals(const CoefficientSamples& s,
                                                  const GTriple<Eigen::ArrayXd>& g, double a);

/// Same equations with a = 0, written in their homogeneous form
///   f_k' g + (k-1) f_k g' + (2-k) f_k   (k != 2)
///   -g'' + f_2' g + f_2 g'              (k = 2)
std::vector<Eigen::ArrayXd> homogeneous_residuals(const CoefficientSamples& s,
                                                  const GTriple<Eigen::ArrayXd>& g);

/// Pointwise a(u) = -(f_{n-1}' g + (n-2) f_{n-1} g' + (3-n) f_{n-1}) / (n f_n g).
Eigen::ArrayXd a_pointwise(const CoefficientSamples& s, const GTriple<Eigen::ArrayXd>& g);

}  // namespace lienard
