#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nerkit {

struct LbfgsOptions {
  std::size_t memory = 10;
  std::size_t max_iterations = 200;
  /// Stop when ||g|| / max(1, ||x||) falls below this.
  double grad_tolerance = 1e-5;
  /// Armijo sufficient-decrease constant.
  double c1 = 1e-4;
  double backtrack = 0.5;
  std::size_t max_backtracks = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  /// Objective at the start point and after every accepted iteration.
  std::vector<double> history;
};

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

/// Limited-memory BFGS minimisation: two-loop recursion for the search
/// direction, backtracking line search on the Armijo condition. A line
/// search failure stops the run with the best point so far.
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts);

}  // namespace nerkit
