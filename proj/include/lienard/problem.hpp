#pragma once

#include <vector>

#include "lienard/expr.hpp"
#include "lienard/interval.hpp"

namespace lienard {

/// One equation  u'' = sum_k f_k(u) (u')^k  on the open interval I.
struct ProblemSpec {
  int n = 0;
  Interval I;
  std::vector<Expr> f;  // f[0] .. f[n]

  /// f_k for any k; zero outside 0..n.
  Expr coefficient(int k) const { return (k < 0 || k > n) ? Expr(0.0) : f[static_cast<std::size_t>(k)]; }

  /// Throws SpecError unless f has n+1 entries and I is non-empty.
  void validate() const;
};

}  // namespace lienard
