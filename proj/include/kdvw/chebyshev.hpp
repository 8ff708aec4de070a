#pragma once

#include <functional>
#include <span>
#include <vector>

namespace kdvw {

// Truncated Chebyshev series sum_{n=0}^{N} a_n T_n(x) on [-1, 1].
struct ChebSeries {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  double operator()(double x) const;
  // Magnitude of the two highest coefficients.
  double tail() const;
  double scale() const;
};

// Chebyshev-Lobatto points cos(pi l / n), l = 0..n.
std::vector<double> cheb_nodes(int n);

// Interpolating series through samples taken at cheb_nodes(samples.size() - 1).
ChebSeries cheb_fit(std::span<const double> samples);

// Antiderivative F with F(-1) = 0, truncated at the input degree.
ChebSeries cheb_antiderivative(const ChebSeries& s);
ChebSeries cheb_derivative(const ChebSeries& s);

// Integral over [-1, 1].
double cheb_integral(const ChebSeries& s);

struct QuadratureOptions {
  int initial = 128;
  int max = 1024;
  double tol = 1e-13;  // tail relative to the largest coefficient
};

struct ChebApproximation {
  ChebSeries series;
  bool resolved = false;
};

// Fit f on [-1, 1], doubling the degree until the tail is below tolerance.
ChebApproximation cheb_approximate(const std::function<double(double)>& f,
                                   const QuadratureOptions& opts = {});

// int_a^b f(mu) / sqrt(mu - a) dmu.  Throws ResolutionError if unresolved.
double integral_endpoint_sqrt(const std::function<double(double)>& f, double a,
                              double b, const QuadratureOptions& opts = {});

// int_{-1}^{1} f(x) / sqrt(1 - x^2) dx.  Throws ResolutionError if unresolved.
double integral_cheb_weight(const std::function<double(double)>& f,
                            const QuadratureOptions& opts = {});

// Reusable DCT-I of fixed size; coefficients of the interpolant through
// samples on cheb_nodes(n).
class ChebTransform {
 public:
  explicit ChebTransform(int n);
  int size() const { return n_; }
  const std::vector<double>& nodes() const { return nodes_; }
  void fit(std::span<const double> samples, std::span<double> coeffs) const;
  // Only the zeroth coefficient.
  double mean(std::span<const double> samples) const;

 private:
  int n_;
  std::vector<double> nodes_;
  std::vector<double> cos_table_;
};

// Shared, lazily built transform of size n (thread-safe).
const ChebTransform& cheb_transform(int n);

}  // namespace kdvw
