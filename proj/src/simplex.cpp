#include "kdvw/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kdvw/errors.hpp"

namespace kdvw {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

SimplexResult simplex_minimize(const Objective& objective, std::vector<double> start,
                               const SimplexOptions& opts) {
  const std::size_t n = start.size();
  if (n == 0) throw DomainError("simplex_minimize: empty start point");
  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Vertex> s;
  s.reserve(n + 1);
  s.push_back({start, eval(start)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = start;
    double h;
    if (i < opts.initial_step.size()) {
      h = opts.initial_step[i];
    } else {
      h = (x[i] != 0.0) ? 0.05 * x[i] : 2.5e-4;
    }
    x[i] += h;
    const double fx = eval(x);
    s.push_back({std::move(x), fx});
  }

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(s[k].x[i] - s[0].x[i]));
    return d;
  };
  auto combine = [&](const std::vector<double>& c, const std::vector<double>& w, double coef) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = c[i] + coef * (c[i] - w[i]);
    return x;
  };

  std::stable_sort(s.begin(), s.end(), by_value);
  std::vector<double> centroid(n);
  for (;;) {
    if (opts.record_history) res.best_history.push_back(s[0].f);
    if (s[0].f < opts.stop_value) {
      res.converged = true;
      res.reason = "value below stop threshold";
      break;
    }
    if (diameter() < opts.tolerance) {
      res.converged = true;
      res.reason = "simplex diameter below tolerance";
      break;
    }
    if (res.iterations >= opts.max_iterations) {
      res.reason = "iteration limit reached";
      break;
    }
    ++res.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) centroid[i] += s[k].x[i];
    for (double& c : centroid) c /= static_cast<double>(n);

    Vertex& worst = s[n];
    std::vector<double> xr = combine(centroid, worst.x, 1.0);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < s[0].f) {
      std::vector<double> xe = combine(centroid, worst.x, 2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        worst = {std::move(xe), fe};
      } else {
        worst = {std::move(xr), fr};
      }
    } else if (fr < s[n - 1].f) {
      worst = {std::move(xr), fr};
    } else if (fr < worst.f) {
      std::vector<double> xc = combine(centroid, worst.x, 0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        worst = {std::move(xc), fc};
      } else {
        shrink = true;
      }
    } else {
      std::vector<double> xcc = combine(centroid, worst.x, -0.5);
      const double fcc = eval(xcc);
      if (fcc < worst.f) {
        worst = {std::move(xcc), fcc};
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t i = 0; i < n; ++i) s[k].x[i] = s[0].x[i] + 0.5 * (s[k].x[i] - s[0].x[i]);
        s[k].f = eval(s[k].x);
      }
    }
    std::stable_sort(s.begin(), s.end(), by_value);
  }
  res.point = s[0].x;
  res.value = s[0].f;
  return res;
}

}  // namespace kdvw
