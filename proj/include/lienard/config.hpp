#pragma once

#include <optional>

#include "lienard/interval.hpp"

namespace lienard {

/// Every numeric default of the pipeline. Command-line flags override
/// problem-file overrides, which override these values.
///
///   grid_size            1024    uniform midpoints of U for all grids
///   margin               auto    1e-8 * (1 + max |f_n|) when left at 0
///   quad_tol             1e-10   adaptive Simpson tolerance per cell
///   quad_max_depth       40
///   offset_seeds         512     scan points for the offset of F
///   offset_range_factor  10      scan c in [-10 span, 10 span]
///   tol_const            1e-6    spread(a) <= tol_const (1 + |mean a|)
///   residual_tol         1e-6    max |R_k| <= residual_tol (1 + max |f_k|)
///   merge_rel            1e-6    offsets closer than merge_rel * span coincide
///   a_zero_tol           1e-6    |a| below this emits the scaling generator
///   jet_*                        sample box for the prolongation check
///   fd_step              1e-5    finite-difference step for user generators
///   flow_tol             1e-4    ODE residual bound for transformed curves
struct Config {
  int grid_size = 1024;
  double margin = 0.0;
  double quad_tol = 1e-10;
  int quad_max_depth = 40;
  int offset_seeds = 512;
  double offset_range_factor = 10.0;
  std::optional<Interval> offset_range;
  double tol_const = 1e-6;
  double residual_tol = 1e-6;
  double merge_rel = 1e-6;
  double a_zero_tol = 1e-6;

  Interval jet_t{0.0, 1.0};
  double jet_u_fraction = 0.8;
  double jet_udot_max = 2.0;
  int jet_t_points = 5;
  int jet_u_points = 17;
  int jet_udot_points = 9;

  double fd_step = 1e-5;
  double flow_tol = 1e-4;
  double verify_tol = 1e-8;
};

}  // namespace lienard
