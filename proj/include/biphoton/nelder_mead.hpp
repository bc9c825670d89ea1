#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace biphoton::fit {

/// Box constraints; infinite entries leave a coordinate unbounded.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  void project(std::vector<double>& x) const;
};

struct NelderMeadOptions {
  /// Initial simplex edge as a fraction of each coordinate's scale.
  double initial_step = 0.05;
  /// Used as the scale of unbounded coordinates.
  std::vector<double> unbounded_scale;
  std::size_t max_evaluations = 20000;
  double f_tolerance = 1e-14;
  double x_tolerance = 1e-10;
  /// Number of times the simplex is rebuilt around the incumbent after it
  /// collapses; guards against premature stalls.
  int rebuilds = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// Best objective value after each iteration.
  std::vector<double> best_history;
};

/// Downhill simplex with reflection, expansion, contraction and shrink steps.
/// Trial points are projected onto the box before evaluation.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const Box& box, const NelderMeadOptions& options = {});

}  // namespace biphoton::fit
