#include "kdvw/asymptotic.hpp"

#include <algorithm>
#include <cmath>

#include "kdvw/elliptic.hpp"
#include "kdvw/errors.hpp"

namespace kdvw {

namespace {

// 1 - s^2 from the gaps.
double complement(const WhithamTriple& w) {
  const double d13 = w.beta[0] - w.beta[2];
  return d13 > 0.0 ? (w.beta[0] - w.beta[1]) / d13 : 0.0;
}

}  // namespace

double omega_phase(const WhithamTriple& w, double q, double x, double t) {
  const double sum = w.beta[0] + w.beta[1] + w.beta[2];
  return std::sqrt(w.beta[0] - w.beta[2]) * (x - 2.0 * sum * t - q);
}

double u_elliptic(const WhithamTriple& w, double q, double x, double t, double eps) {
  if (!(eps > 0.0)) throw DomainError("u_elliptic: eps must be positive");
  const double d12 = w.beta[0] - w.beta[1];
  if (w.beta[1] == w.beta[2]) return w.beta[0];
  const double m1 = complement(w);
  double z = omega_phase(w, q, x, t) / eps;
  if (m1 > 0.0) {
    // dn has period 2K; reducing first keeps the Landen recursion accurate.
    const double period = 2.0 * elliptic_KE_parameter(1.0 - m1, m1).K;
    z = std::remainder(z, period);
  }
  const double dn = jacobi_sncndn_parameter(z, m1).dn;
  return w.beta[1] + w.beta[2] - w.beta[0] + 2.0 * d12 / (dn * dn);
}

double u_elliptic_theta(const WhithamTriple& w, double q, double x, double t, double eps) {
  if (!(eps > 0.0)) throw DomainError("u_elliptic_theta: eps must be positive");
  const double m1 = complement(w);
  if (!(m1 > 0.0 && m1 < 1.0)) throw DomainError("u_elliptic_theta: needs a strictly ordered triple");
  const auto ke = elliptic_KE_parameter(1.0 - m1, m1);
  const double Kp = elliptic_KE_parameter(m1, 1.0 - m1).K;
  const double scale = std::sqrt(w.beta[0] - w.beta[2]) / (2.0 * eps * ke.K);
  const double sum = w.beta[0] + w.beta[1] + w.beta[2];
  const double z = scale * (x - 2.0 * sum * t - q);
  const auto th = theta3_derivs(z, Kp / ke.K);
  const double d2log = th.d2 / th.value - (th.d1 / th.value) * (th.d1 / th.value);
  return mean_value(w) + 2.0 * eps * eps * scale * scale * d2log;
}

double mean_value(const WhithamTriple& w) {
  return w.beta[0] + w.beta[1] + w.beta[2] + 2.0 * w.alpha;
}

Envelope envelope(const WhithamTriple& w) {
  return {w.beta[0] - w.beta[1] + w.beta[2], w.beta[0] + w.beta[1] - w.beta[2]};
}

// ---------------------------------------------------------------- interpolation

ZoneInterpolant::ZoneInterpolant(const Profile& p, const ZoneSolution& z)
    : p_(&p), t_(z.t), x_minus_(z.leading.x_edge), x_plus_(z.trailing.x_edge) {
  std::vector<double> x, b1, b2, x3, q;
  auto push = [&](double xv, const WhithamTriple& w, double qv) {
    x.push_back(xv);
    b1.push_back(w.beta[0]);
    b2.push_back(w.beta[1]);
    x3.push_back(w.x3);
    q.push_back(qv);
  };
  const auto& l = z.leading;
  const auto wl = make_triple(p, {l.beta_outer, l.beta_double, l.beta_double}, Regime::x3_negative);
  push(x_minus_, wl, q_phase(p, wl));
  for (const auto& pt : z.points) {
    if (!pt.converged) continue;
    if (!(pt.triple.x > x.back() && pt.triple.x < x_plus_)) continue;
    push(pt.triple.x, pt.triple, pt.q);
  }
  const auto& r = z.trailing;
  const auto wr = make_triple(p, r.beta_double, r.beta_double, r.x3);
  push(x_plus_, wr, q_phase(p, wr));
  if (x.size() < 4) throw ResolutionError("zone interpolant: fewer than two solved interior points");
  b1_ = CubicSpline(x, b1);
  b2_ = CubicSpline(x, b2);
  x3_ = CubicSpline(x, x3);
  q_ = CubicSpline(std::move(x), q);
}

WhithamTriple ZoneInterpolant::triple_at(double x) const {
  if (!(x >= x_minus_ && x <= x_plus_)) throw DomainError("zone interpolant: x outside [x-, x+]");
  const double x3 = x3_.value(x);
  const double b3 = p_->value(x3);
  const double b1 = std::max(b1_.value(x), b3);
  const double b2 = std::clamp(b2_.value(x), b3, b1);
  return make_triple(*p_, b1, b2, x3, x, t_);
}

// ---------------------------------------------------------------- composite

Composite::Composite(const Profile& p, const ZoneSolution& z)
    : p_(&p),
      zone_(p, z),
      xi_minus_(p.inverse(z.leading.beta_outer, Branch::decreasing)),
      xi_plus_(z.trailing.x3) {}

HopfSample Composite::hopf_at(double x, Region side) const {
  const double t = zone_.t();
  // x = 6 t u0(xi) + xi is increasing on each attached branch and 6 t u0 lies in [6 t umin, 0].
  const double umin = p_->minimum_value();
  double lo = x, hi = x - 6.0 * t * umin;
  if (side == Region::outside_left) hi = std::min(hi, xi_minus_);
  else if (side == Region::outside_right) lo = std::max(lo, xi_plus_);
  else throw DomainError("hopf_at: side must be outside the zone");
  auto g = [&](double xi) { return 6.0 * t * p_->value(xi) + xi - x; };
  if (g(lo) > 0.0 || g(hi) < 0.0) throw DomainError("hopf_at: x is not on the requested side");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return hopf_solve_at(*p_, x, t, 0.5 * (lo + hi));
}

AsymptoticSample Composite::at(double x, double eps) const {
  AsymptoticSample s;
  s.x = x;
  s.t = zone_.t();
  s.eps = eps;
  if (x < zone_.x_minus() || x > zone_.x_plus()) {
    s.region = x < zone_.x_minus() ? Region::outside_left : Region::outside_right;
    s.hopf = hopf_at(x, s.region);
    s.u_app = s.hopf->u;
    return s;
  }
  s.region = Region::whitham;
  s.triple = zone_.triple_at(x);
  s.u_app = u_elliptic(*s.triple, zone_.q_at(x), x, s.t, eps);
  return s;
}

std::vector<AsymptoticSample> Composite::sample(std::span<const double> x, double eps) const {
  std::vector<AsymptoticSample> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(at(v, eps));
  return out;
}

}  // namespace kdvw
