#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kdvw/profile.hpp"

namespace kdvw {

// Point on the implicit solution u = u0(xi), x = 6 t u0(xi) + xi.
struct HopfSample {
  double x = 0.0;
  double t = 0.0;
  double xi = 0.0;
  double u = 0.0;
  double residual = 0.0;  // x - 6 t u0(xi) - xi
};

struct HopfOptions {
  bool precision = true;  // drive the residual to rounding level; otherwise stop at 1e-6
};

enum class Side { left_of_zone, right_of_zone };

struct HopfBranch {
  std::vector<HopfSample> samples;  // ascending x
  std::optional<std::size_t> failed_at;  // index into the input grid
};

HopfSample hopf_solve_at(const Profile& p, double x, double t, double xi_start,
                         const HopfOptions& opts = {});

// Continuation along the grid, walking toward the zone from the single-valued side.
HopfBranch hopf_solve_branch(const Profile& p, std::span<const double> x_grid, double t, Side side,
                             const HopfOptions& opts = {});

}  // namespace kdvw
