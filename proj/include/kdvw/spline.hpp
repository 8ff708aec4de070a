#pragma once

#include <cstddef>
#include <vector>

namespace kdvw {

// Natural cubic spline; the end cubics continue outside the knots.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double value(double x) const;
  double derivative(double x) const;
  const std::vector<double>& knots() const { return x_; }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment(double x) const;
  std::vector<double> x_, y_, m_;  // m_ = second derivatives at the knots
};

}  // namespace kdvw
