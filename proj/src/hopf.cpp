#include "kdvw/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kdvw/errors.hpp"
#include "kdvw/simplex.hpp"

namespace kdvw {

HopfSample hopf_solve_at(const Profile& p, double x, double t, double xi_start, const HopfOptions& opts) {
  auto residual = [&](double xi) { return x - 6.0 * t * p.value(xi) - xi; };
  const double r0 = residual(xi_start);
  const double slope = 6.0 * t * p.derivative(xi_start) + 1.0;
  double step = (slope != 0.0) ? std::abs(r0 / slope) : 1e-3;
  step = std::clamp(step, 1e-12, 0.5);

  SimplexOptions so;
  so.initial_step = {step};
  so.max_iterations = 2000;
  const double accept = opts.precision ? 1e-10 : 1e-6;
  if (opts.precision) {
    so.stop_value = 1e-30;
    so.tolerance = 1e-16 * std::max(1.0, std::abs(xi_start));
  } else {
    so.stop_value = 1e-12;
    so.tolerance = 1e-10;
  }
  const auto r = simplex_minimize(
      [&](std::span<const double> v) {
        const double e = residual(v[0]);
        return e * e;
      },
      {xi_start}, so);

  HopfSample s;
  s.x = x;
  s.t = t;
  s.xi = r.point[0];
  s.u = p.value(s.xi);
  s.residual = residual(s.xi);
  if (!(std::abs(s.residual) < accept))
    throw ConvergenceError("hopf: no root near xi = " + std::to_string(xi_start) +
                           ", last residual " + std::to_string(s.residual));
  return s;
}

HopfBranch hopf_solve_branch(const Profile& p, std::span<const double> x_grid, double t, Side side,
                             const HopfOptions& opts) {
  std::vector<std::size_t> order(x_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return side == Side::left_of_zone ? x_grid[a] < x_grid[b] : x_grid[a] > x_grid[b];
  });
  HopfBranch out;
  bool first = true;
  double xi = 0.0;
  for (std::size_t idx : order) {
    const double x = x_grid[idx];
    if (first) xi = x;
    try {
      const HopfSample s = hopf_solve_at(p, x, t, xi, opts);
      xi = s.xi;
      out.samples.push_back(s);
    } catch (const ConvergenceError&) {
      out.failed_at = idx;
      break;
    }
    first = false;
  }
  if (side == Side::right_of_zone) std::reverse(out.samples.begin(), out.samples.end());
  return out;
}

}  // namespace kdvw
