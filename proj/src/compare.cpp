#include "kdvw/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdvw/errors.hpp"

namespace kdvw {

ScalingFit linreg(std::span<const double> z, std::span<const double> y) {
  const std::size_t m = z.size();
  if (m != y.size()) throw DomainError("linreg: size mismatch");
  if (m < 3) throw DomainError("linreg: needs at least three points");
  double zb = 0.0, yb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    zb += z[i];
    yb += y[i];
  }
  zb /= m;
  yb /= m;
  double szz = 0.0, szy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    szz += (z[i] - zb) * (z[i] - zb);
    szy += (z[i] - zb) * (y[i] - yb);
    syy += (y[i] - yb) * (y[i] - yb);
  }
  if (!(szz > 0.0)) throw DomainError("linreg: all abscissae are equal");
  ScalingFit f;
  f.n_points = static_cast<int>(m);
  f.slope = szy / szz;
  f.intercept = yb - f.slope * zb;
  f.r = syy > 0.0 ? std::clamp(szy / std::sqrt(szz * syy), -1.0, 1.0) : 0.0;
  f.sigma = std::sqrt(std::max(syy - f.slope * szy, 0.0) / (m - 2));
  f.sigma_slope = f.sigma / std::sqrt(szz);
  f.sigma_intercept = f.sigma * std::sqrt(1.0 / m + zb * zb / szz);
  return f;
}

ScalingFit scaling_fit(std::span<const double> eps, std::span<const double> value) {
  if (eps.size() != value.size()) throw DomainError("scaling_fit: size mismatch");
  std::vector<double> z, y;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && value[i] > 0.0)) throw DomainError("scaling_fit: needs positive data");
    z.push_back(std::log10(eps[i]));
    y.push_back(std::log10(value[i]));
  }
  return linreg(z, y);
}

std::vector<double> resample(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> xq) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 4) throw DomainError("resample: needs at least four samples");
  std::vector<double> out;
  out.reserve(xq.size());
  for (double x : xq) {
    if (!(x >= xs.front() && x <= xs.back())) throw DomainError("resample: point outside the table");
    const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const std::size_t j0 = std::clamp<std::size_t>(k < 2 ? 0 : k - 2, 0, n - 4);
    double v = 0.0;
    for (std::size_t a = j0; a < j0 + 4; ++a) {
      double l = 1.0;
      for (std::size_t b = j0; b < j0 + 4; ++b)
        if (b != a) l *= (x - xs[b]) / (xs[a] - xs[b]);
      v += l * ys[a];
    }
    out.push_back(v);
  }
  return out;
}

namespace {

Region region_of(double x, double xm, double xp) {
  if (x < xm) return Region::outside_left;
  return x > xp ? Region::outside_right : Region::whitham;
}

double local_wavelength(const WhithamTriple& w, double eps) {
  return 2.0 * w.K * eps / std::sqrt(w.beta[0] - w.beta[2]);
}

double max_abs(const DiffField& d, double lo, double hi, bool& found, double* where = nullptr) {
  double m = 0.0;
  found = false;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    if (d.x[i] < lo || d.x[i] > hi) continue;
    found = true;
    if (std::abs(d.diff[i]) > m) {
      m = std::abs(d.diff[i]);
      if (where) *where = d.x[i];
    }
  }
  return m;
}

}  // namespace

DiffField difference(std::span<const double> x, std::span<const double> u_kdv, const Composite& c,
                     double eps) {
  if (x.size() != u_kdv.size()) throw DomainError("difference: size mismatch");
  DiffField d;
  d.t = c.zone().t();
  d.eps = eps;
  d.x_minus = c.zone().x_minus();
  d.x_plus = c.zone().x_plus();
  d.x.assign(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto s = c.at(x[i], eps);
    d.diff.push_back(u_kdv[i] - s.u_app);
    d.region.push_back(s.region);
  }
  return d;
}

DiffField difference(std::span<const double> x, std::span<const double> u_kdv,
                     std::span<const double> x_app, std::span<const double> u_app, double t,
                     double eps, double x_minus, double x_plus) {
  if (x.size() != u_kdv.size()) throw DomainError("difference: size mismatch");
  const auto ua = resample(x_app, u_app, x);
  DiffField d;
  d.t = t;
  d.eps = eps;
  d.x_minus = x_minus;
  d.x_plus = x_plus;
  d.x.assign(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.diff.push_back(u_kdv[i] - ua[i]);
    d.region.push_back(region_of(x[i], x_minus, x_plus));
  }
  return d;
}

Boundary zone_boundary(const DiffField& d, Side side, double threshold) {
  const std::size_t n = d.x.size();
  if (side == Side::left_of_zone) {
    for (std::size_t i = 0; i < n && d.x[i] < d.x_minus; ++i)
      if (std::abs(d.diff[i]) >= threshold) return {d.x[i], i == 0};
    return {d.x_minus, false};
  }
  for (std::size_t i = n; i-- > 0 && d.x[i] > d.x_plus;)
    if (std::abs(d.diff[i]) >= threshold) return {d.x[i], i == n - 1};
  return {d.x_plus, false};
}

EdgeWindows edge_wavelengths(const Composite& c, double eps) {
  const auto& z = c.zone();
  const double half = 0.5 * (z.x_plus() - z.x_minus());
  auto settle = [&](double edge, double sign) {
    double lambda = local_wavelength(z.triple_at(edge + sign * 1e-3 * half), eps);
    for (int i = 0; i < 8; ++i)
      lambda = local_wavelength(z.triple_at(edge + sign * std::min(lambda, half)), eps);
    return std::min(lambda, half);
  };
  return {settle(z.x_minus(), 1.0), settle(z.x_plus(), -1.0)};
}

Metrics error_metrics(const DiffField& d, const EdgeWindows& w, const MetricsOptions& o) {
  if (d.x.size() != d.diff.size()) throw DomainError("error_metrics: size mismatch");
  Metrics m;
  m.eps = d.eps;
  m.t = d.t;
  m.x_minus = d.x_minus;
  m.x_plus = d.x_plus;
  const double mid = 0.5 * (d.x_minus + d.x_plus);
  m.mid_half_width = o.mid_half_width * (d.x_plus - d.x_minus);
  bool found = false;
  m.err_mid = max_abs(d, mid - m.mid_half_width, mid + m.mid_half_width, found);
  if (!found) throw ResolutionError("error_metrics: no grid point in the mid-zone window");
  m.err_left_edge = max_abs(d, d.x_minus, d.x_minus + w.left, found);
  if (!found) throw ResolutionError("error_metrics: no grid point near x-");
  m.err_right_edge = max_abs(d, d.x_plus - w.right, d.x_plus, found);
  if (!found) throw ResolutionError("error_metrics: no grid point near x+");
  const double inf = std::numeric_limits<double>::infinity();
  m.err_hopf_minus = max_abs(d, -inf, std::nextafter(d.x_minus, -inf), found);
  m.x_err_hopf_plus = d.x_plus;
  m.err_hopf_plus = max_abs(d, std::nextafter(d.x_plus, inf), inf, found, &m.x_err_hopf_plus);
  m.hopf_minus = zone_boundary(d, Side::left_of_zone, o.threshold);
  m.hopf_plus = zone_boundary(d, Side::right_of_zone, o.threshold);
  m.delta_minus = m.hopf_minus.x / d.x_minus - 1.0;
  m.delta_plus = 1.0 - m.hopf_plus.x / d.x_plus;
  return m;
}

}  // namespace kdvw
