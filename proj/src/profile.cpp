#include "kdvw/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kdvw/errors.hpp"
#include "kdvw/simplex.hpp"

namespace kdvw {

namespace {

constexpr double kPi = std::numbers::pi;

double refine_minimum(const std::function<double(double)>& u, double x0, double step) {
  SimplexOptions opts;
  opts.stop_value = -std::numeric_limits<double>::infinity();
  opts.tolerance = 1e-13 * std::max(1.0, std::abs(x0));
  opts.initial_step = {step};
  const auto r = simplex_minimize([&](std::span<const double> x) { return u(x[0]); }, {x0}, opts);
  return r.point[0];
}

}  // namespace

// ---------------------------------------------------------------- Profile

double Profile::difference(double x, double dx) const {
  if (std::abs(dx) > 0.25) return value(x + dx) - value(x);
  static constexpr double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                      0.5384693101056831, 0.9061798459386640};
  static constexpr double weights[5] = {0.2369268850561891, 0.4786286704993665,
                                        0.5688888888888889, 0.4786286704993665,
                                        0.2369268850561891};
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += weights[i] * derivative(x + 0.5 * dx * (1.0 + nodes[i]));
  return 0.5 * dx * sum;
}

double Profile::inverse(double y, Branch b) const {
  const double xm = minimum_location();
  const double um = value(xm);
  if (!(y >= um) || !(y < 0.0)) throw DomainError("inverse: level outside [min u0, 0)");
  if (y == um) return xm;
  const double dir = (b == Branch::decreasing) ? -1.0 : 1.0;
  double inner = xm;
  double step = 1.0;
  double outer = xm + dir * step;
  for (int it = 0; value(outer) <= y; ++it) {
    if (it > 200) throw ConvergenceError("inverse: level not bracketed");
    inner = outer;
    step *= 2.0;
    outer = xm + dir * step;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inner + outer);
    if (mid == inner || mid == outer) break;
    (value(mid) <= y ? inner : outer) = mid;
  }
  const double lo = std::min(inner, outer), hi = std::max(inner, outer);
  double x = 0.5 * (inner + outer);
  for (int it = 0; it < 3; ++it) {
    const double d = derivative(x);
    if (d == 0.0) break;
    const double next = x - (value(x) - y) / d;
    if (!(next >= lo - (hi - lo) && next <= hi + (hi - lo))) break;
    x = next;
  }
  return x;
}

double Profile::inverse_derivative(double y, Branch b) const {
  return 1.0 / derivative(inverse(y, b));
}

PathIntegrals Profile::path_integrals_quadrature(double level, double delta, double x_start) const {
  double xt = inverse(level, Branch::decreasing);
  double span = x_start - xt;
  // Short paths: solve for the span from delta; the label xt itself cannot
  // resolve a span much below its own spacing.
  if (delta != 0.0 && std::abs(span) < 0.2) {
    for (int i = 0; i < 4; ++i) {
      const double slope = derivative(x_start - span);
      if (slope == 0.0) break;
      span += (difference(x_start, -span) - delta) / slope;
    }
    xt = x_start - span;
  }
  if (span == 0.0) return {};
  const double edge = 1.0 / std::sqrt(std::abs(derivative(xt) * span));
  for (int n = path_quadrature_.initial;; n *= 2) {
    const ChebTransform& tr = cheb_transform(n);
    std::vector<double> ha(n + 1), hb(n + 1);
    for (int l = 0; l <= n; ++l) {
      const double s = 0.5 * (1.0 + tr.nodes()[l]);
      if (s == 0.0) {
        ha[l] = edge;
        hb[l] = 0.0;
        continue;
      }
      const double d = std::abs(difference(xt, span * s * s));
      ha[l] = s / std::sqrt(d);
      hb[l] = d * ha[l];
    }
    ChebSeries sa, sb;
    sa.coeffs.resize(n + 1);
    sb.coeffs.resize(n + 1);
    tr.fit(ha, sa.coeffs);
    tr.fit(hb, sb.coeffs);
    const bool ok = sa.tail() <= path_quadrature_.tol * sa.scale() &&
                    sb.tail() <= path_quadrature_.tol * std::max(sb.scale(), 1e-300);
    if (ok || 2 * n > path_quadrature_.max) {
      if (!ok && !(sa.tail() <= 1e-9 * sa.scale()))
        throw ResolutionError("path integrals: integrand unresolved");
      return {-span * cheb_integral(sa), -span * cheb_integral(sb)};
    }
  }
}

PathIntegrals Profile::path_integrals(double level, double delta, double x_start) const {
  return path_integrals_quadrature(level, delta, x_start);
}

double Profile::phi(double level, double delta, double x_start) const {
  const double xm = minimum_location();
  if (delta == 0.0) {
    if (x_start > xm) throw DomainError("phi: coincident arguments on the increasing branch");
    return inverse_derivative(level, Branch::decreasing);
  }
  if (delta < 0.0 && x_start > xm) throw DomainError("phi: level below a value on the increasing branch");
  const PathIntegrals p = path_integrals(level, delta, x_start);
  return std::copysign(1.0, delta) * p.A / (2.0 * std::sqrt(std::abs(delta)));
}

// ---------------------------------------------------------------- sech^2

double Sech2Profile::value(double x) const {
  const double c = std::cosh(x);
  return -1.0 / (c * c);
}

double Sech2Profile::derivative(double x) const {
  const double c = std::cosh(x);
  return 2.0 * std::tanh(x) / (c * c);
}

double Sech2Profile::difference(double x, double dx) const {
  const double c0 = std::cosh(x), c1 = std::cosh(x + dx);
  return std::sinh(dx) * std::sinh(2.0 * x + dx) / (c0 * c0 * c1 * c1);
}

double Sech2Profile::inverse(double y, Branch b) const {
  if (!(y >= -1.0) || !(y < 0.0)) throw DomainError("inverse: level outside [-1, 0)");
  const double fm = 0.5 * std::log(-y) - std::log1p(std::sqrt(1.0 + y));
  return b == Branch::decreasing ? fm : -fm;
}

double Sech2Profile::inverse_derivative(double y, Branch b) const {
  if (!(y >= -1.0) || !(y < 0.0)) throw DomainError("inverse_derivative: level outside [-1, 0)");
  const double d = 1.0 / (2.0 * y * std::sqrt(1.0 + y));
  return b == Branch::decreasing ? d : -d;
}

PathIntegrals Sech2Profile::path_integrals(double level, double delta, double x3) const {
  if (!(level < 0.0)) throw DomainError("path integrals: level must be negative");
  if (!(delta > 0.0)) return path_integrals_quadrature(level, delta, x3);
  const double xl = inverse(level, Branch::decreasing);
  // Closed form loses digits to cancellation on short paths.
  if (std::abs(x3 - xl) < 0.2) return path_integrals_quadrature(level, delta, x3);
  const double r = std::sqrt(-level);
  const double sd = std::sqrt(delta);
  const double theta = std::atan2(sd * std::cosh(x3), -std::sinh(x3) * r);
  PathIntegrals p;
  p.A = -theta / r;
  p.B = -0.5 * kPi - std::atan(std::tanh(x3) / sd) + r * theta;
  return p;
}

double Sech2Profile::phi(double level, double delta, double x3) const {
  if (!(level < 0.0)) throw DomainError("phi: level must be negative");
  const double r = std::sqrt(-level);
  if (delta > 0.0) {
    const double sd = std::sqrt(delta);
    const double theta = std::atan2(sd * std::cosh(x3), -std::sinh(x3) * r);
    return -theta / (2.0 * r * sd);
  }
  if (x3 > 0.0) throw DomainError("phi: level below a value on the increasing branch");
  if (delta == 0.0) return inverse_derivative(level, Branch::decreasing);
  const double sd = std::sqrt(-delta);
  const double v = sd * std::cosh(x3) / std::sqrt(1.0 + level);
  return -std::asinh(v) / (2.0 * r * sd);
}

std::optional<CriticalPoint> Sech2Profile::exact_critical_point() const {
  CriticalPoint c;
  c.t = std::sqrt(3.0) / 8.0;
  c.u = -2.0 / 3.0;
  c.xi = std::log((std::sqrt(3.0) - 1.0) / std::sqrt(2.0));
  c.x = -std::sqrt(3.0) / 2.0 + c.xi;
  return c;
}

// ---------------------------------------------------------------- callables

FunctionProfile::FunctionProfile(std::string name, std::function<double(double)> u,
                                 std::function<double(double)> du, std::optional<double> x_min,
                                 double search_lo, double search_hi)
    : name_(std::move(name)), u_(std::move(u)), du_(std::move(du)) {
  if (x_min) {
    x_min_ = *x_min;
    return;
  }
  const int n = 4000;
  const double h = (search_hi - search_lo) / n;
  double best = search_lo;
  for (int i = 0; i <= n; ++i) {
    const double x = search_lo + i * h;
    if (u_(x) < u_(best)) best = x;
  }
  x_min_ = refine_minimum(u_, best, h);
}

// ---------------------------------------------------------------- tables

TabulatedProfile::TabulatedProfile(std::vector<double> x, std::vector<double> u, std::string name)
    : name_(std::move(name)) {
  const std::size_t n = x.size();
  if (n < 4 || u.size() != n) throw DomainError("tabulated profile: need at least 4 (x, u) pairs");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("tabulated profile: x must be increasing");
  std::size_t imin = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (u[i] < u[imin]) imin = i;
  const double step = x[std::min(imin + 1, n - 1)] - x[imin > 0 ? imin - 1 : 0];
  const double x_start = x[imin];
  x_lo_ = x.front();
  x_hi_ = x.back();
  spline_ = CubicSpline(std::move(x), std::move(u));
  x_min_ = refine_minimum([this](double t) { return value(t); }, x_start, 0.25 * step);
}

TabulatedProfile TabulatedProfile::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile table: " + path);
  std::vector<double> x, u;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) {
      x.push_back(a);
      u.push_back(b);
    }
  }
  return TabulatedProfile(std::move(x), std::move(u), path);
}

double TabulatedProfile::value(double x) const {
  return spline_.value(std::clamp(x, x_lo_, x_hi_));
}

double TabulatedProfile::derivative(double x) const {
  if (x <= x_lo_ || x >= x_hi_) return 0.0;
  return spline_.derivative(x);
}

// ---------------------------------------------------------------- free functions

std::unique_ptr<Profile> make_profile(const std::string& spec) {
  if (spec == "sech2") return std::make_unique<Sech2Profile>();
  const std::string prefix = "table:";
  if (spec.rfind(prefix, 0) == 0)
    return std::make_unique<TabulatedProfile>(TabulatedProfile::from_file(spec.substr(prefix.size())));
  throw ConfigError("unknown profile '" + spec + "' (expected sech2 or table:<file>)");
}

double inverse_third_derivative(const Profile& p, double y, Branch b, double h) {
  auto f1 = [&](double v) { return p.inverse_derivative(v, b); };
  return (-f1(y + 2 * h) + 16 * f1(y + h) - 30 * f1(y) + 16 * f1(y - h) - f1(y - 2 * h)) / (12 * h * h);
}

double phi_kernel(const Profile& p, double xi, double eta, Branch eta_branch) {
  const double x = p.inverse(eta, eta_branch);
  return p.phi(xi, xi - eta, x);
}

CriticalPoint critical_point(const Profile& p) {
  const double um = p.minimum_value();
  const int n = 400;
  double best_xi = p.minimum_location(), best_slope = 0.0, spacing = 1.0;
  double prev = p.minimum_location();
  for (int k = 1; k <= n; ++k) {
    const double xi = p.inverse(um * (1.0 - static_cast<double>(k) / (n + 1)), Branch::decreasing);
    const double s = p.derivative(xi);
    if (s < best_slope) {
      best_slope = s;
      best_xi = xi;
      spacing = std::abs(prev - xi);
    }
    prev = xi;
  }
  if (!(best_slope < 0.0)) throw ConvergenceError("critical_point: no decreasing branch found");
  SimplexOptions opts;
  opts.stop_value = -std::numeric_limits<double>::infinity();
  opts.tolerance = 1e-13;
  opts.initial_step = {std::max(spacing, 1e-6)};
  const auto r = simplex_minimize([&](std::span<const double> x) { return p.derivative(x[0]); },
                                  {best_xi}, opts);
  CriticalPoint c;
  c.xi = r.point[0];
  c.t = -1.0 / (6.0 * p.derivative(c.xi));
  c.u = p.value(c.xi);
  c.x = c.xi + 6.0 * c.t * c.u;
  return c;
}

}  // namespace kdvw
