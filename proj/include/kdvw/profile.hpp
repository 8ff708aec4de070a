#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kdvw/chebyshev.hpp"
#include "kdvw/spline.hpp"

namespace kdvw {

// Single-well initial data u0 with u0 -> 0 at infinity and one minimum.
enum class Branch { decreasing, increasing };

struct CriticalPoint {
  double t = 0.0;   // breaking time
  double x = 0.0;   // breaking position
  double u = 0.0;   // value at breaking
  double xi = 0.0;  // label of the breaking characteristic
};

// Path integrals from the label x_start to the turning label X of `level`
// on the decreasing branch (u0(X) = level):
//   A = int_{x_start}^{X} dx / sqrt|level - u0(x)|
//   B = int_{x_start}^{X} sqrt|level - u0(x)| dx
struct PathIntegrals {
  double A = 0.0;
  double B = 0.0;
};

class Profile {
 public:
  virtual ~Profile() = default;

  virtual std::string name() const = 0;
  virtual double value(double x) const = 0;
  virtual double derivative(double x) const = 0;
  // u0(x + dx) - u0(x); short steps integrate the derivative to avoid cancellation.
  virtual double difference(double x, double dx) const;
  virtual double minimum_location() const = 0;
  double minimum_value() const { return value(minimum_location()); }

  // Label on the given branch with u0(label) = y, for y in [min, 0).
  virtual double inverse(double y, Branch b) const;
  virtual double inverse_derivative(double y, Branch b) const;

  // delta = level - u0(x_start), supplied by the caller so that it keeps full
  // precision when the two values are close.
  virtual PathIntegrals path_integrals(double level, double delta, double x_start) const;

  // Phi(level, eta) with eta = u0(x_start) = level - delta:
  //   sgn(delta) A / (2 sqrt|delta|), and f'_-(level) for delta = 0.
  virtual double phi(double level, double delta, double x_start) const;

  virtual std::optional<CriticalPoint> exact_critical_point() const { return std::nullopt; }

 protected:
  PathIntegrals path_integrals_quadrature(double level, double delta, double x_start) const;
  QuadratureOptions path_quadrature_{16, 1024, 1e-14};
};

// u0(x) = -sech^2(x)
class Sech2Profile final : public Profile {
 public:
  std::string name() const override { return "sech2"; }
  double value(double x) const override;
  double derivative(double x) const override;
  double difference(double x, double dx) const override;
  double minimum_location() const override { return 0.0; }
  double inverse(double y, Branch b) const override;
  double inverse_derivative(double y, Branch b) const override;
  PathIntegrals path_integrals(double level, double delta, double x_start) const override;
  double phi(double level, double delta, double x_start) const override;
  std::optional<CriticalPoint> exact_critical_point() const override;
};

// Profile given by callables; the minimum is located numerically when not supplied.
class FunctionProfile : public Profile {
 public:
  FunctionProfile(std::string name, std::function<double(double)> u,
                  std::function<double(double)> du, std::optional<double> x_min = std::nullopt,
                  double search_lo = -50.0, double search_hi = 50.0);
  std::string name() const override { return name_; }
  double value(double x) const override { return u_(x); }
  double derivative(double x) const override { return du_(x); }
  double minimum_location() const override { return x_min_; }

 private:
  std::string name_;
  std::function<double(double)> u_, du_;
  double x_min_ = 0.0;
};

// Natural cubic spline through (x, u) samples; constant outside the table.
class TabulatedProfile final : public Profile {
 public:
  TabulatedProfile(std::vector<double> x, std::vector<double> u, std::string name = "tabulated");
  static TabulatedProfile from_file(const std::string& path);

  std::string name() const override { return name_; }
  double value(double x) const override;
  double derivative(double x) const override;
  double minimum_location() const override { return x_min_; }

 private:
  std::string name_;
  CubicSpline spline_;
  double x_lo_ = 0.0, x_hi_ = 0.0;
  double x_min_ = 0.0;
};

std::unique_ptr<Profile> make_profile(const std::string& spec);

// f_- and f_+ derivatives; f''' of a branch by fourth-order differences of f' with step 1e-3.
double inverse_third_derivative(const Profile& p, double y, Branch b, double h = 1e-3);

// Phi(xi, eta) with eta located on the given branch.
double phi_kernel(const Profile& p, double xi, double eta, Branch eta_branch = Branch::decreasing);

// Breaking point found numerically from the steepest point of the decreasing branch.
CriticalPoint critical_point(const Profile& p);

}  // namespace kdvw
