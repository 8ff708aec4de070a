#include "kdvw/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "kdvw/errors.hpp"

namespace kdvw {

double ChebSeries::operator()(double x) const {
  double b1 = 0.0, b2 = 0.0;
  for (int n = degree(); n >= 1; --n) {
    const double b0 = 2.0 * x * b1 - b2 + coeffs[n];
    b2 = b1;
    b1 = b0;
  }
  return coeffs.empty() ? 0.0 : x * b1 - b2 + coeffs[0];
}

double ChebSeries::tail() const {
  const int n = degree();
  if (n < 1) return 0.0;
  return std::max(std::abs(coeffs[n]), std::abs(coeffs[n - 1]));
}

double ChebSeries::scale() const {
  double s = 0.0;
  for (double a : coeffs) s = std::max(s, std::abs(a));
  return s;
}

std::vector<double> cheb_nodes(int n) {
  std::vector<double> x(n + 1);
  for (int l = 0; l <= n; ++l) {
    // Symmetric form keeps the nodes exactly antisymmetric.
    x[l] = std::sin(std::numbers::pi * (n - 2.0 * l) / (2.0 * n));
  }
  return x;
}

ChebTransform::ChebTransform(int n) : n_(n), nodes_(cheb_nodes(n)), cos_table_(2 * n) {
  if (n < 1) throw DomainError("Chebyshev transform needs at least two nodes");
  for (int j = 0; j < 2 * n; ++j) cos_table_[j] = std::cos(std::numbers::pi * j / n);
}

void ChebTransform::fit(std::span<const double> f, std::span<double> a) const {
  const int n = n_;
  for (int k = 0; k <= n; ++k) {
    double sum = 0.5 * (f[0] + ((k % 2 == 0) ? f[n] : -f[n]));
    int idx = 0;
    for (int l = 1; l < n; ++l) {
      idx += k;
      if (idx >= 2 * n) idx -= 2 * n;
      sum += f[l] * cos_table_[idx];
    }
    a[k] = sum * ((k == 0 || k == n) ? 1.0 : 2.0) / n;
  }
}

double ChebTransform::mean(std::span<const double> f) const {
  double sum = 0.5 * (f[0] + f[n_]);
  for (int l = 1; l < n_; ++l) sum += f[l];
  return sum / n_;
}

const ChebTransform& cheb_transform(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<ChebTransform>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<ChebTransform>(n);
  return *slot;
}

ChebSeries cheb_fit(std::span<const double> samples) {
  ChebTransform tr(static_cast<int>(samples.size()) - 1);
  ChebSeries s;
  s.coeffs.resize(samples.size());
  tr.fit(samples, s.coeffs);
  return s;
}

ChebSeries cheb_antiderivative(const ChebSeries& s) {
  const int n = s.degree();
  ChebSeries out;
  out.coeffs.assign(n + 1, 0.0);
  if (n < 1) {
    out.coeffs.resize(2, 0.0);
    out.coeffs[1] = s.coeffs.empty() ? 0.0 : s.coeffs[0];
    out.coeffs[0] = out.coeffs[1];
    return out;
  }
  const auto& a = s.coeffs;
  for (int k = 1; k < n; ++k) {
    const double prev = (k == 1) ? 2.0 * a[0] : a[k - 1];
    out.coeffs[k] = (prev - a[k + 1]) / (2.0 * k);
  }
  out.coeffs[n] = ((n == 1) ? 2.0 * a[0] : a[n - 1]) / (2.0 * n);
  double b0 = 0.0;
  for (int k = 1; k <= n; ++k) b0 -= (k % 2 == 0 ? 1.0 : -1.0) * out.coeffs[k];
  out.coeffs[0] = b0;
  return out;
}

ChebSeries cheb_derivative(const ChebSeries& s) {
  const int n = s.degree();
  ChebSeries out;
  if (n < 1) {
    out.coeffs.assign(1, 0.0);
    return out;
  }
  std::vector<double> d(n + 2, 0.0);
  for (int k = n; k >= 1; --k) d[k - 1] = d[k + 1] + 2.0 * k * s.coeffs[k];
  d[0] *= 0.5;
  out.coeffs.assign(d.begin(), d.begin() + n);
  return out;
}

double cheb_integral(const ChebSeries& s) {
  const ChebSeries F = cheb_antiderivative(s);
  double sum = 0.0;
  for (int k = 1; k <= F.degree(); k += 2) sum += F.coeffs[k];
  return 2.0 * sum;
}

ChebApproximation cheb_approximate(const std::function<double(double)>& f,
                                   const QuadratureOptions& opts) {
  ChebApproximation out;
  for (int n = std::max(2, opts.initial); n <= std::max(opts.max, opts.initial); n *= 2) {
    const ChebTransform& tr = cheb_transform(n);
    std::vector<double> samples(n + 1);
    for (int l = 0; l <= n; ++l) samples[l] = f(tr.nodes()[l]);
    out.series.coeffs.assign(n + 1, 0.0);
    tr.fit(samples, out.series.coeffs);
    const double scale = out.series.scale();
    if (!std::isfinite(scale)) break;
    if (out.series.tail() <= opts.tol * std::max(scale, 1e-300)) {
      out.resolved = true;
      break;
    }
  }
  return out;
}

double integral_endpoint_sqrt(const std::function<double(double)>& f, double a,
                              double b, const QuadratureOptions& opts) {
  if (!(b > a)) {
    if (b == a) return 0.0;
    throw DomainError("integral_endpoint_sqrt: need b > a");
  }
  const double w = b - a;
  auto g = [&](double y) {
    const double s = 0.5 * (1.0 + y);
    return f(a + w * s * s);
  };
  const auto approx = cheb_approximate(g, opts);
  if (!approx.resolved) throw ResolutionError("integral_endpoint_sqrt: integrand unresolved");
  return std::sqrt(w) * cheb_integral(approx.series);
}

double integral_cheb_weight(const std::function<double(double)>& f,
                            const QuadratureOptions& opts) {
  const auto approx = cheb_approximate(f, opts);
  if (!approx.resolved) throw ResolutionError("integral_cheb_weight: integrand unresolved");
  return std::numbers::pi * approx.series.coeffs[0];
}

}  // namespace kdvw
