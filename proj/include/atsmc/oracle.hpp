// Analytic cross-check for tree-shaped models: bottom-up CDF propagation on a
// uniform time grid.  Leaves use the closed-form exponential CDF, OR and AND
// gates combine pointwise, SAND gates convolve child distributions.  Values
// are exact at grid points for leaf, OR and AND nodes; SAND introduces the
// second-order error of the trapezoid convolution.  Between grid points
// at_time interpolates linearly.
//
// The propagation requires a proper tree.  Models where a node feeds several
// parents are rejected, because the product rules above assume independent
// child distributions.
#pragma once

#include <string_view>
#include <vector>

#include "atsmc/model.hpp"

namespace atsmc {

struct CdfGrid {
  double step = 0.0;
  std::vector<double> values;  // values[k] estimates F(k * step); values[0] == 0

  double horizon() const {
    return values.empty() ? 0.0 : step * static_cast<double>(values.size() - 1);
  }
  // Linear interpolation, clamped to [0, horizon()].
  double at_time(double t) const;
};

struct OracleSettings {
  double step = 0.1;
};

// Disruption-time CDF of one node over [0, horizon].  Throws InvalidTreeError
// when the model fails validation and OracleError when the model has shared
// nodes, the node id is unknown, or the grid settings are unusable (the step
// must be positive and at most horizon / 10).
CdfGrid node_cdf(const AttackTree& tree, std::string_view node_id, double horizon,
                 const OracleSettings& settings = {});

// node_cdf of the top event.
CdfGrid top_curve(const AttackTree& tree, double horizon,
                  const OracleSettings& settings = {});

// Top-event disruption probability within `time`.
double top_probability(const AttackTree& tree, double time,
                       const OracleSettings& settings = {});

// CDF of the sum of two independent nonnegative random variables, by
// Stieltjes integration of `a` against increments of `b`.  Both grids must
// share step and length.  Parallelized across grid points when built with
// OpenMP; the serial variant is the reference the parallel kernel is tested
// against.
CdfGrid convolve_cdfs(const CdfGrid& a, const CdfGrid& b);
CdfGrid convolve_cdfs_serial(const CdfGrid& a, const CdfGrid& b);

}  // namespace atsmc
