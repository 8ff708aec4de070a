#pragma once

#include <span>
#include <vector>

#include "kdvw/asymptotic.hpp"

namespace kdvw {

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double sigma_slope = 0.0;
  double sigma_intercept = 0.0;
  double sigma = 0.0;  // residual standard deviation
  double r = 0.0;      // 0 when y is constant
  int n_points = 0;
};

ScalingFit linreg(std::span<const double> z, std::span<const double> y);
// linreg on (log10 eps, log10 value).
ScalingFit scaling_fit(std::span<const double> eps, std::span<const double> value);
inline bool reportable(const ScalingFit& f) { return f.r >= 0.99; }

// Local cubic Lagrange interpolation on an ascending grid; exact on cubics.
std::vector<double> resample(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> xq);

struct DiffField {
  double t = 0.0;
  double eps = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;
  std::vector<double> x;
  std::vector<double> diff;  // u_kdv - u_asymptotic
  std::vector<Region> region;
};

DiffField difference(std::span<const double> x, std::span<const double> u_kdv, const Composite& c,
                     double eps);
// The asymptotic table is resampled onto the KdV grid.
DiffField difference(std::span<const double> x, std::span<const double> u_kdv,
                     std::span<const double> x_app, std::span<const double> u_app, double t,
                     double eps, double x_minus, double x_plus);

struct Boundary {
  double x = 0.0;
  bool at_domain_end = false;  // the threshold is never met on that side
};

// Outermost point beyond the zone edge where |diff| reaches the threshold;
// the edge itself when it never does.
Boundary zone_boundary(const DiffField& d, Side side, double threshold = 1e-4);

// One local wavelength 2 K eps / sqrt(beta_1 - beta_3), taken at one wavelength
// inside each edge.
struct EdgeWindows {
  double left = 0.0;
  double right = 0.0;
};
EdgeWindows edge_wavelengths(const Composite& c, double eps);

struct MetricsOptions {
  double mid_half_width = 0.05;  // fraction of the zone width
  double threshold = 1e-4;
};

struct Metrics {
  double eps = 0.0;
  double t = 0.0;
  double x_minus = 0.0;
  double x_plus = 0.0;
  double err_mid = 0.0;
  double err_left_edge = 0.0;
  double err_right_edge = 0.0;
  double err_hopf_minus = 0.0;
  double err_hopf_plus = 0.0;
  double x_err_hopf_plus = 0.0;  // where err_hopf_plus is attained
  Boundary hopf_minus, hopf_plus;
  double delta_minus = 0.0;  // x_hopf^- / x^- - 1
  double delta_plus = 0.0;   // 1 - x_hopf^+ / x^+
  double mid_half_width = 0.0;
};

Metrics error_metrics(const DiffField& d, const EdgeWindows& w, const MetricsOptions& o = {});

}  // namespace kdvw
