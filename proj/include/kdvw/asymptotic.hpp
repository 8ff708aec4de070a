#pragma once

#include <optional>
#include <span>
#include <vector>

#include "kdvw/hopf.hpp"
#include "kdvw/spline.hpp"
#include "kdvw/whitham.hpp"

namespace kdvw {

enum class Region { outside_left, whitham, outside_right };

struct AsymptoticSample {
  double x = 0.0;
  double t = 0.0;
  double eps = 0.0;
  double u_app = 0.0;
  Region region = Region::outside_left;
  std::optional<WhithamTriple> triple;
  std::optional<HopfSample> hopf;
};

// Omega = sqrt(beta_1 - beta_3) (x - 2 (beta_1 + beta_2 + beta_3) t - q)
double omega_phase(const WhithamTriple& w, double q, double x, double t);

// beta_2 + beta_3 - beta_1 + 2 (beta_1 - beta_2) / dn^2(Omega / eps)
double u_elliptic(const WhithamTriple& w, double q, double x, double t, double eps);

// u_bar + 2 eps^2 d^2/dx^2 log theta(...), evaluated from the theta series.
double u_elliptic_theta(const WhithamTriple& w, double q, double x, double t, double eps);

// u_bar = beta_1 + beta_2 + beta_3 + 2 alpha
double mean_value(const WhithamTriple& w);

struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
};

Envelope envelope(const WhithamTriple& w);

// Cubic splines of beta_1, beta_2, the label of beta_3 and q across the zone,
// with the two edge states as end knots.
class ZoneInterpolant {
 public:
  ZoneInterpolant(const Profile& p, const ZoneSolution& z);

  // Ordering is clamped, so beta_2 may coincide with beta_1 or beta_3 near the edges.
  WhithamTriple triple_at(double x) const;
  double q_at(double x) const { return q_.value(x); }
  double x_minus() const { return x_minus_; }
  double x_plus() const { return x_plus_; }
  double t() const { return t_; }

 private:
  const Profile* p_;
  double t_, x_minus_, x_plus_;
  CubicSpline b1_, b2_, x3_, q_;
};

// Hopf outside [x-, x+], the elliptic solution inside.
class Composite {
 public:
  Composite(const Profile& p, const ZoneSolution& z);

  AsymptoticSample at(double x, double eps) const;
  std::vector<AsymptoticSample> sample(std::span<const double> x, double eps) const;
  const ZoneInterpolant& zone() const { return zone_; }

  // Hopf branch attached to the left (beta_1) or right (beta_3) edge.
  HopfSample hopf_at(double x, Region side) const;

 private:
  const Profile* p_;
  ZoneInterpolant zone_;
  double xi_minus_, xi_plus_;  // labels of the outer invariants at the edges
};

}  // namespace kdvw
