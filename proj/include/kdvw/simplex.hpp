#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kdvw {

using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
  double stop_value = 1e-12;  // converged once the best value drops below this
  double tolerance = 1e-12;   // or once the simplex diameter drops below this
  int max_iterations = 5000;
  std::vector<double> initial_step;  // per coordinate; defaults to 5% of |x0| or 2.5e-4
  bool record_history = false;
};

struct SimplexResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> best_history;
};

// Nelder-Mead with reflection 1, expansion 2, contraction 1/2, shrink 1/2.
// Non-finite objective values are treated as +inf.
SimplexResult simplex_minimize(const Objective& f, std::vector<double> start,
                               const SimplexOptions& opts = {});

}  // namespace kdvw
