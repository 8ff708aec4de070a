#include "kdvw/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kdvw/chebyshev.hpp"
#include "kdvw/elliptic.hpp"
#include "kdvw/errors.hpp"
#include "kdvw/simplex.hpp"

namespace kdvw {

namespace {

// Differences kept separately so that nearly merged pairs stay accurate.
struct Gaps {
  double d12, d13, d23;
};

Gaps gaps(const WhithamTriple& w) {
  return {w.beta[0] - w.beta[1], w.beta[0] - w.beta[2], w.beta[1] - w.beta[2]};
}

EllipticPair elliptic_of(const Gaps& g) { return elliptic_KE_parameter(g.d23 / g.d13, g.d12 / g.d13); }

// P_i = v_i - 2 sum beta.
std::array<double, 3> reduced_speeds(const Gaps& g, const EllipticPair& e) {
  if (e.E_minus_m1K == 0.0 || e.K_minus_E == 0.0 || e.E == 0.0)
    throw DomainError("whitham: degenerate speed denominator");
  return {4.0 * g.d12 * e.K / e.E, -4.0 * g.d12 * e.m * e.K / e.E_minus_m1K,
          -4.0 * g.d23 * e.K / e.K_minus_E};
}

// Mean over Chebyshev-Lobatto nodes of a vector-valued integrand, doubling the
// node count until every component settles. This is a_0 for the weight 1/sqrt(1 - nu^2).
template <std::size_t N>
std::array<double, N> lobatto_mean(const std::function<std::array<double, N>(double)>& f,
                                   const PhaseOptions& o, int* nodes_used = nullptr) {
  int n = std::max(2, o.initial);
  std::array<double, N> sum{}, prev{};
  auto add = [&](double nu, double w) {
    const auto v = f(nu);
    for (std::size_t k = 0; k < N; ++k) sum[k] += w * v[k];
  };
  add(1.0, 0.5);
  add(-1.0, 0.5);
  for (int l = 1; l < n; ++l) add(std::cos(std::numbers::pi * l / n), 1.0);
  for (std::size_t k = 0; k < N; ++k) prev[k] = sum[k] / n;
  while (2 * n <= o.max) {
    n *= 2;
    for (int l = 1; l < n; l += 2) add(std::cos(std::numbers::pi * l / n), 1.0);
    bool done = true;
    std::array<double, N> cur{};
    for (std::size_t k = 0; k < N; ++k) {
      cur[k] = sum[k] / n;
      if (!std::isfinite(cur[k])) throw ResolutionError("whitham: non-finite phase integrand");
      if (std::abs(cur[k] - prev[k]) > o.tol * std::max(1.0, std::abs(cur[k]))) done = false;
    }
    prev = cur;
    if (done) {
      if (nodes_used) *nodes_used = n + 1;
      return cur;
    }
  }
  throw ResolutionError("whitham: phase quadrature unresolved at " + std::to_string(n) + " nodes");
}

// G = I / sqrt(delta) and its derivatives in lambda and beta_3, where
// I(lambda) = int f(xi) / sqrt(lambda - xi) along the label path from x3.
struct GTerms {
  double G, G_lambda, G_3;
};

GTerms g_terms(const Profile& p, double lambda, double delta, double x3) {
  if (delta <= 0.0) {
    const double fp = 1.0 / p.derivative(x3);
    return {2.0 * x3, 4.0 / 3.0 * fp, 2.0 / 3.0 * fp};
  }
  const PathIntegrals pi = p.path_integrals(lambda, delta, x3);
  const double sd = std::sqrt(delta);
  return {2.0 * x3 + 2.0 * pi.B / sd, (delta * pi.A - pi.B) / (delta * sd), pi.B / (delta * sd)};
}

double beta3_label(const Profile& p, double b3, Regime r) {
  return p.inverse(b3, r == Regime::x3_positive ? Branch::increasing : Branch::decreasing);
}

WhithamTriple build_triple(double b1, double b2, double b3, double x3, double x, double t) {
  WhithamTriple w;
  w.beta = {b1, b2, b3};
  w.x3 = x3;
  w.x = x;
  w.t = t;
  if (!(b1 < 0.0 && b1 >= b2 && b2 >= b3)) throw DomainError("whitham: need 0 > beta_1 >= beta_2 >= beta_3");
  const Gaps g = gaps(w);
  if (g.d23 == 0.0) {
    w.K = w.E = std::numbers::pi / 2;
    w.alpha = -b3;
  } else if (g.d12 == 0.0) {
    w.s2 = 1.0;
    w.K = std::numeric_limits<double>::infinity();
    w.E = 1.0;
    w.alpha = -b1;
  } else {
    const EllipticPair e = elliptic_of(g);
    w.s2 = e.m;
    w.K = e.K;
    w.E = e.E;
    w.alpha = -b1 + g.d13 * e.E / e.K;
  }
  return w;
}

}  // namespace

WhithamTriple make_triple(const Profile& p, double b1, double b2, double x3, double x, double t) {
  return build_triple(b1, b2, p.value(x3), x3, x, t);
}

WhithamTriple make_triple(const Profile& p, std::array<double, 3> beta, Regime r, double x, double t) {
  if (!(beta[0] < 0.0 && beta[0] >= beta[1] && beta[1] >= beta[2]))
    throw DomainError("whitham: need 0 > beta_1 >= beta_2 >= beta_3");
  return build_triple(beta[0], beta[1], beta[2], beta3_label(p, beta[2], r), x, t);
}

std::array<double, 3> speeds(const WhithamTriple& w) {
  const Gaps g = gaps(w);
  if (!(g.d12 > 0.0 && g.d23 > 0.0)) throw DomainError("whitham: speeds need strict ordering");
  const auto P = reduced_speeds(g, elliptic_of(g));
  const double s = 2.0 * (w.beta[0] + w.beta[1] + w.beta[2]);
  return {s + P[0], s + P[1], s + P[2]};
}

PhaseGradient phase_gradient(const Profile& p, const WhithamTriple& w, const PhaseOptions& o) {
  const Gaps g = gaps(w);
  const double b1 = w.beta[0], b2 = w.beta[1];
  std::function<std::array<double, 4>(double)> f = [&](double nu) {
    const double a = 0.5 * (1.0 + nu), b = 0.5 * (1.0 - nu);
    const GTerms t = g_terms(p, a * b1 + b * b2, a * g.d13 + b * g.d23, w.x3);
    return std::array<double, 4>{0.5 * t.G, 0.5 * a * t.G_lambda, 0.5 * b * t.G_lambda, 0.5 * t.G_3};
  };
  PhaseGradient out;
  const auto m = lobatto_mean<4>(f, o, &out.nodes);
  out.q = m[0];
  out.dq = {m[1], m[2], m[3]};
  out.Q = m[1] + m[2] + m[3];
  return out;
}

double q_phase(const Profile& p, const WhithamTriple& w, const PhaseOptions& o) {
  return phase_gradient(p, w, o).q;
}

std::array<double, 3> w_coeffs(const Profile& p, const WhithamTriple& w, const PhaseOptions& o) {
  const Gaps g = gaps(w);
  const auto P = reduced_speeds(g, elliptic_of(g));
  const PhaseGradient ph = phase_gradient(p, w, o);
  return {0.5 * P[0] * ph.dq[0] + ph.q, 0.5 * P[1] * ph.dq[1] + ph.q, 0.5 * P[2] * ph.dq[2] + ph.q};
}

std::array<double, 3> hodograph_residual(const Profile& p, const WhithamTriple& w, double x, double t,
                                         const PhaseOptions& o) {
  const Gaps g = gaps(w);
  const EllipticPair e = elliptic_of(g);
  const PhaseGradient ph = phase_gradient(p, w, o);
  const double R1 = t + 0.5 * ph.dq[0], R2 = t + 0.5 * ph.dq[1], R3 = t + 0.5 * ph.dq[2];
  const double sum = w.beta[0] + w.beta[1] + w.beta[2];
  const double S1 = 4.0 / e.E * R1 + 4.0 * e.m / e.E_minus_m1K * R2;
  const double S2 = 2.0 * sum * t - 4.0 * g.d23 * e.K / e.K_minus_E * R3 + ph.q - x;
  const double S3 = -4.0 * e.m1 * e.K / e.E_minus_m1K * R2 + 4.0 * e.K / e.K_minus_E * R3;
  return {S1, S2, S3};
}

std::array<double, 3> beta_x_derivatives(const Profile& p, const WhithamTriple& w, const PhaseOptions& o) {
  const Gaps g = gaps(w);
  const auto P = reduced_speeds(g, elliptic_of(g));
  const double b1 = w.beta[0], b2 = w.beta[1];
  const double u3 = p.derivative(w.x3);
  // Phi(lambda, beta_3) differentiated by fourth-order differences in lambda and in the label x3.
  std::function<std::array<double, 3>(double)> f = [&](double nu) {
    const double a = 0.5 * (1.0 + nu), b = 0.5 * (1.0 - nu);
    const double lam = a * b1 + b * b2, del = a * g.d13 + b * g.d23;
    const double h = std::min(1e-4, 0.2 * del);
    auto phi_l = [&](double s) { return p.phi(lam + s, del + s, w.x3); };
    const double d_lam =
        (8.0 * (phi_l(h) - phi_l(-h)) - (phi_l(2 * h) - phi_l(-2 * h))) / (12.0 * h);
    const double hx = std::min(1e-4, 0.2 * del / std::max(std::abs(u3), 1e-3));
    auto phi_x = [&](double s) { return p.phi(lam, del - p.difference(w.x3, s), w.x3 + s); };
    const double d_x = (8.0 * (phi_x(hx) - phi_x(-hx)) - (phi_x(2 * hx) - phi_x(-2 * hx))) / (12.0 * hx);
    const double d3 = d_x / u3;
    return std::array<double, 3>{a * d_lam, b * d_lam, d3};
  };
  PhaseOptions fd = o;
  fd.tol = std::max(o.tol, 1e-10);
  const auto dQ = lobatto_mean<3>(f, fd);
  return {2.0 / (P[0] * dQ[0]), 2.0 / (P[1] * dQ[1]), 2.0 / (P[2] * dQ[2])};
}

// ---------------------------------------------------------------- edges

namespace {

double accept_level(const SolveOptions& o) { return o.precision ? 1e-20 : 1e-12; }
double stop_level(const SolveOptions& o) { return o.precision ? 1e-28 : 1e-14; }

// Simplex in chunks, restarted from the best point at shrinking step sizes.
// Once accepted, a chunk that gains less than a factor 10 ends the search:
// near the rounding floor the stop value may be out of reach.
SimplexResult minimize(const Objective& f, std::vector<double> x0, std::vector<double> step, double stop,
                       double accept, int max_iterations) {
  SimplexOptions so;
  so.stop_value = stop;
  so.tolerance = 1e-16;
  so.max_iterations = std::min(max_iterations, 2000);
  so.initial_step = step;
  SimplexResult best = simplex_minimize(f, std::move(x0), so);
  for (int k = 1; best.value >= stop && best.iterations < max_iterations; ++k) {
    const int shrink = std::min(k, 6);
    for (std::size_t i = 0; i < step.size(); ++i)
      so.initial_step[i] = std::max(std::abs(step[i]) * std::pow(0.1, shrink), 1e-14);
    const double before = best.value;
    SimplexResult r = simplex_minimize(f, best.point, so);
    r.iterations += best.iterations;
    r.evaluations += best.evaluations;
    if (r.value <= best.value) {
      best = std::move(r);
    } else {
      best.iterations = r.iterations;
      best.evaluations = r.evaluations;
    }
    if (best.value < accept && best.value > 0.1 * before) break;
    if (k >= 6 && !(best.value < before)) break;
  }
  return best;
}

double guarded(const std::function<double()>& f) {
  try {
    const double v = f();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Fourth-order central difference.
double diff4(const std::function<double(double)>& f, double h) {
  return (8.0 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12.0 * h);
}

double diff2_second(const std::function<double(double)>& f, double h) {
  return (-f(2 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2 * h)) / (12.0 * h * h);
}

// Phi(level, eta) with eta given by its label.
double phi_at(const Profile& p, double level, double eta, double x_eta) {
  return p.phi(level, level - eta, x_eta);
}

// (Phi(b3, b1) + 6t, d/db3 Phi(b3, b1))
std::array<double, 2> leading_equations(const Profile& p, double t, double b1, double b3) {
  const double x1 = p.inverse(b1, Branch::decreasing);
  const double h = std::min(1e-3, 0.05 * (b3 - p.minimum_value()));
  const double r1 = phi_at(p, b3, b1, x1) + 6.0 * t;
  const double r2 = diff4([&](double s) { return phi_at(p, b3 + s, b1, x1); }, h);
  return {r1, r2};
}

// -int sqrt(u0(x3) - u0) across the well below u0(x3), x3 on the increasing branch.
double well_offset(const Profile& p, double x3) {
  const double xl = p.inverse(p.value(x3), Branch::decreasing);
  const double mid = 0.5 * (x3 + xl), half = 0.5 * (x3 - xl);
  auto g = [&](double y) {
    const double th = 0.5 * std::numbers::pi * (1.0 + y);
    const double xi = mid - half * std::cos(th);
    return std::sqrt(std::max(-p.difference(x3, xi - x3), 0.0)) * std::sin(th);
  };
  const auto approx = cheb_approximate(g, {16, 1024, 1e-14});
  if (!approx.resolved) throw ResolutionError("trailing edge: well integral unresolved");
  return -0.5 * std::numbers::pi * half * cheb_integral(approx.series);
}

// (Phi(b1, b3) + 6t, int_{b3}^{b1} sqrt(l - b3) [Phi(l, b3) + 6t] dl / (b1 - b3)^{3/2})
std::array<double, 2> trailing_equations(const Profile& p, double t, double b1, double x3) {
  const double b3 = p.value(x3);
  const double D = b1 - b3;
  const double r1 = p.phi(b1, D, x3) + 6.0 * t;
  // Phi alone sets the resolution scale; int s^2 dy = 2/3 carries the 6t term.
  auto g = [&](double y) {
    const double s = 0.5 * (1.0 + y);
    if (s == 0.0) return 0.0;
    return s * s * p.phi(b3 + D * s * s, D * s * s, x3);
  };
  const auto approx = cheb_approximate(g, {16, 512, 1e-14});
  if (!approx.resolved) throw ResolutionError("trailing edge: integrand unresolved");
  // Past the minimum the path from x3 no longer shrinks as lambda -> beta_3 and
  // B keeps a finite offset; the hodograph system vanishes only with it included.
  const double b0 = x3 > p.minimum_location() ? well_offset(p, x3) : 0.0;
  return {r1, cheb_integral(approx.series) + 4.0 * t + b0 / (D * std::sqrt(D))};
}

double third_derivative_at_break(const Profile& p, const CriticalPoint& c) {
  return std::abs(inverse_third_derivative(p, c.u, Branch::decreasing));
}

}  // namespace

EdgeSeed leading_seed(const Profile& p, double t) {
  const CriticalPoint c = critical_point(p);
  if (!(t > c.t)) throw DomainError("leading edge: t must exceed the breaking time");
  const double a = std::sqrt(72.0 * (t - c.t) / third_derivative_at_break(p, c));
  return {c.u + a, c.u - 0.25 * a, 0.0};
}

EdgeSeed trailing_seed(const Profile& p, double t) {
  const CriticalPoint c = critical_point(p);
  if (!(t > c.t)) throw DomainError("trailing edge: t must exceed the breaking time");
  const double D = std::sqrt(122.5 * (t - c.t) / third_derivative_at_break(p, c));
  const double b3 = c.u - 4.0 * D / 7.0;
  return {b3, c.u + 3.0 * D / 7.0, p.inverse(b3, Branch::decreasing)};
}

EdgePoint leading_edge(const Profile& p, double t, std::optional<EdgeSeed> seed, const SolveOptions& o) {
  const EdgeSeed s = seed ? *seed : leading_seed(p, t);
  const double umin = p.minimum_value();
  auto f = [&](std::span<const double> v) {
    return guarded([&] {
      if (!(v[0] < 0.0 && v[1] < v[0] && v[1] > umin)) return std::numeric_limits<double>::infinity();
      const auto r = leading_equations(p, t, v[0], v[1]);
      return r[0] * r[0] + r[1] * r[1];
    });
  };
  const double scale = std::max(1e-6, 0.05 * (s.beta_outer - s.beta_double));
  const auto r = minimize(f, {s.beta_outer, s.beta_double}, {scale, scale}, stop_level(o), accept_level(o),
                          o.max_iterations);
  EdgePoint e;
  e.kind = EdgeKind::leading;
  e.t = t;
  e.beta_outer = r.point[0];
  e.beta_double = r.point[1];
  e.x3 = p.inverse(e.beta_double, Branch::decreasing);
  const double x1 = p.inverse(e.beta_outer, Branch::decreasing);
  e.x_edge = 6.0 * t * e.beta_outer + x1;
  const auto eq = leading_equations(p, t, e.beta_outer, e.beta_double);
  e.residual = {0.0, eq[0], eq[1]};
  e.converged = r.value < accept_level(o);
  return e;
}

EdgePoint trailing_edge(const Profile& p, double t, std::optional<EdgeSeed> seed, const SolveOptions& o) {
  const EdgeSeed s = seed ? *seed : trailing_seed(p, t);
  auto f = [&](std::span<const double> v) {
    return guarded([&] {
      if (!(v[0] < 0.0 && v[0] > p.value(v[1]))) return std::numeric_limits<double>::infinity();
      const auto r = trailing_equations(p, t, v[0], v[1]);
      return r[0] * r[0] + r[1] * r[1];
    });
  };
  const double scale = std::max(1e-6, 0.05 * (s.beta_double - s.beta_outer));
  const auto r = minimize(f, {s.beta_double, s.x3}, {scale, scale}, stop_level(o), accept_level(o),
                          o.max_iterations);
  EdgePoint e;
  e.kind = EdgeKind::trailing;
  e.t = t;
  e.beta_double = r.point[0];
  e.x3 = r.point[1];
  e.beta_outer = p.value(e.x3);
  e.x_edge = 6.0 * t * e.beta_outer + e.x3;
  const auto eq = trailing_equations(p, t, e.beta_double, e.x3);
  e.residual = {eq[0], eq[1], 0.0};
  e.converged = r.value < accept_level(o);
  return e;
}

HumpCrossing hump_time(const Profile& p, const SolveOptions& o) {
  const double xm = p.minimum_location(), umin = p.minimum_value();
  auto T_of = [&](double b1) { return -p.phi(b1, b1 - umin, xm) / 6.0; };
  auto r2 = [&](double b1) { return trailing_equations(p, T_of(b1), b1, xm)[1]; };
  // Bracket on the curve where the first equation holds, then polish both.
  const int n = 64;
  double lo = std::numeric_limits<double>::quiet_NaN(), hi = lo;
  double prev_b = umin + (0.0 - umin) * 1.0 / (n + 1), prev = r2(prev_b);
  for (int i = 2; i <= n; ++i) {
    const double b = umin + (0.0 - umin) * i / (n + 1);
    const double cur = r2(b);
    if ((prev < 0.0) != (cur < 0.0)) {
      lo = prev_b;
      hi = b;
      break;
    }
    prev_b = b;
    prev = cur;
  }
  if (std::isnan(lo)) throw ConvergenceError("hump time: no sign change of the trailing integral");
  double flo = r2(lo);
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi), fm = r2(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double b1 = 0.5 * (lo + hi);
  auto f = [&](std::span<const double> v) {
    return guarded([&] {
      if (!(v[1] < 0.0 && v[1] > umin)) return std::numeric_limits<double>::infinity();
      const auto r = trailing_equations(p, v[0], v[1], xm);
      return r[0] * r[0] + r[1] * r[1];
    });
  };
  const auto r = minimize(f, {T_of(b1), b1}, {1e-8, 1e-8}, stop_level(o), accept_level(o), o.max_iterations);
  HumpCrossing h;
  h.T = r.point[0];
  h.beta1_at_T = r.point[1];
  h.x_T = 6.0 * h.T * umin + xm;
  h.residual = trailing_equations(p, h.T, h.beta1_at_T, xm);
  if (!(r.value < accept_level(o))) throw ConvergenceError("hump time: simplex did not reach tolerance");
  return h;
}

EdgeAsymptotics edge_asymptotics(const Profile& p, double t) {
  const CriticalPoint c = critical_point(p);
  if (t < c.t) throw DomainError("edge asymptotics: t precedes the breaking time");
  const double dt = t - c.t;
  const double root = std::sqrt(third_derivative_at_break(p, c));
  const double lin = c.x + 6.0 * c.u * dt;
  const double d32 = dt * std::sqrt(dt);
  return {lin - 36.0 * std::numbers::sqrt2 / root * d32, lin + 4.0 * std::sqrt(10.0) / (3.0 * root) * d32};
}

std::vector<double> edge_track_times(const Profile& p, double t_end, int n_linear) {
  const double tc = critical_point(p).t;
  std::vector<double> ts;
  for (double d : {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3}) {
    if (tc + d < t_end) ts.push_back(tc + d);
  }
  const double start = tc + 1e-2;
  if (start < t_end) {
    for (int i = 0; i <= n_linear; ++i) ts.push_back(start + (t_end - start) * i / n_linear);
  } else {
    ts.push_back(t_end);
  }
  return ts;
}

EdgeTrack edge_track(const Profile& p, const std::vector<double>& times, const SolveOptions& o) {
  EdgeTrack tr;
  std::optional<EdgeSeed> ls, ts;
  for (double t : times) {
    if (!ls) ls = leading_seed(p, t);
    if (!ts) ts = trailing_seed(p, t);
    EdgePoint l = leading_edge(p, t, ls, o);
    EdgePoint r = trailing_edge(p, t, ts, o);
    // Linear extrapolation in t from the last two solves.
    auto next = [&](const std::vector<EdgePoint>& hist, const EdgePoint& cur, double t_next) {
      EdgeSeed s{cur.beta_outer, cur.beta_double, cur.x3};
      if (!hist.empty()) {
        const EdgePoint& a = hist.back();
        const double w = (t_next - cur.t) / (cur.t - a.t);
        s.beta_outer += w * (cur.beta_outer - a.beta_outer);
        s.beta_double += w * (cur.beta_double - a.beta_double);
        s.x3 += w * (cur.x3 - a.x3);
      }
      return s;
    };
    const std::size_t k = tr.leading.size();
    const double t_next = k + 1 < times.size() ? times[k + 1] : t;
    ls = next(tr.leading, l, t_next);
    ts = next(tr.trailing, r, t_next);
    tr.leading.push_back(l);
    tr.trailing.push_back(r);
  }
  return tr;
}

// ---------------------------------------------------------------- zone

std::vector<double> zone_grid(double x_minus, double x_plus, int nx, double edge_fraction) {
  if (nx < 3 || !(x_plus > x_minus)) throw DomainError("zone grid: need nx >= 3 and x_plus > x_minus");
  const int ne = nx / 3, nm = nx - 2 * ne;
  const double layer = edge_fraction * (x_plus - x_minus);
  std::vector<double> x;
  x.reserve(nx);
  for (int j = 1; j <= ne; ++j) {
    const double r = static_cast<double>(j) / ne;
    x.push_back(x_minus + layer * r * r);
  }
  const double a = x_minus + layer, b = x_plus - layer;
  for (int k = 1; k <= nm; ++k) x.push_back(a + (b - a) * k / (nm + 1));
  for (int j = ne; j >= 1; --j) {
    const double r = static_cast<double>(j) / ne;
    x.push_back(x_plus - layer * r * r);
  }
  return x;
}

namespace {

struct ZoneState {
  double b1, b2, x3;
};

double zone_objective(const Profile& p, const ZoneState& s, double x, double t) {
  return guarded([&] {
    const double b3 = p.value(s.x3);
    if (!(s.b1 < 0.0 && s.b1 > s.b2 && s.b2 > b3)) return std::numeric_limits<double>::infinity();
    const auto S = hodograph_residual(p, make_triple(p, s.b1, s.b2, s.x3), x, t);
    return S[0] * S[0] + S[1] * S[1] + S[2] * S[2];
  });
}

ZonePoint solve_point(const Profile& p, double x, double t, const ZoneState& seed, const ZoneState& step,
                      const SolveOptions& o) {
  auto f = [&](std::span<const double> v) { return zone_objective(p, {v[0], v[1], v[2]}, x, t); };
  const auto r = minimize(f, {seed.b1, seed.b2, seed.x3}, {step.b1, step.b2, step.x3}, stop_level(o),
                          accept_level(o), o.max_iterations);
  ZonePoint z;
  z.sum_sq = r.value;
  z.evaluations = r.evaluations;
  z.converged = r.value < (o.precision ? 1e-12 : 1e-6) && std::isfinite(r.value);
  if (std::isfinite(r.value)) {
    z.triple = make_triple(p, r.point[0], r.point[1], r.point[2], x, t);
    z.q = q_phase(p, z.triple);
  } else {
    z.triple = make_triple(p, seed.b1, seed.b2, seed.x3, x, t);
  }
  return z;
}

ZoneState state_of(const ZonePoint& z) { return {z.triple.beta[0], z.triple.beta[1], z.triple.x3}; }

// Seed a short distance dx inside the leading edge: beta_1 follows the Hopf
// slope while the merged pair splits like sqrt(dx).
ZoneState leading_start(const Profile& p, const EdgePoint& e, double t, double dx) {
  const double b1 = e.beta_outer, v = e.beta_double;
  const double x1 = p.inverse(b1, Branch::decreasing);
  const double slope = 1.0 / (6.0 * t + 1.0 / p.derivative(x1));
  const double h = std::min(1e-3, 0.05 * (v - p.minimum_value()));
  const double pvv = diff2_second([&](double s) { return phi_at(p, v + s, b1, x1); }, h);
  double d = std::sqrt(std::abs(dx / ((v - b1) * pvv)));
  d = std::min(d, 0.25 * (b1 - v));
  return {b1 + slope * dx, v + d, p.inverse(v - d, Branch::decreasing)};
}

// Inside the trailing edge the merged pair splits like sqrt(dx / log(1/dx)).
ZoneState trailing_start(const Profile& p, const EdgePoint& e, double t, double dx) {
  const double v = e.beta_double, b3 = e.beta_outer;
  const double slope3 = 1.0 / (6.0 * t + 1.0 / p.derivative(e.x3));
  const double h = std::min(1e-3, 0.05 * (v - b3));
  const double pv = diff4([&](double s) { return p.phi(v + s, v + s - b3, e.x3); }, h);
  double d = std::sqrt(dx / std::max(std::abs(pv), 1e-3));
  for (int i = 0; i < 5; ++i) {
    const double L = std::log(16.0 * (v - b3) / d);
    d = std::sqrt(dx / (std::max(std::abs(pv), 1e-3) * std::max(L, 1.0)));
  }
  d = std::min(d, 0.25 * (v - b3));
  // beta_3 follows the Hopf slope on its own branch; shift the label accordingly.
  const double ux = p.derivative(e.x3);
  const double x3_new = ux != 0.0 ? e.x3 - slope3 * dx / ux : e.x3;
  return {v + d, v - d, x3_new};
}

ZoneState extrapolate(const ZoneState& a, const ZoneState& b, double xa, double xb, double x) {
  const double w = (x - xb) / (xb - xa);
  return {b.b1 + w * (b.b1 - a.b1), b.b2 + w * (b.b2 - a.b2), b.x3 + w * (b.x3 - a.x3)};
}

ZoneState step_between(const ZoneState& a, const ZoneState& b) {
  auto sz = [](double d) { return std::max(std::abs(d), 1e-9); };
  return {sz(b.b1 - a.b1), sz(b.b2 - a.b2), sz(b.x3 - a.x3)};
}

bool ordered(const Profile& p, const ZoneState& s) {
  return s.b1 < 0.0 && s.b1 > s.b2 && s.b2 > p.value(s.x3);
}

// Continuation along x[idx...] from an edge, in the given order.
void sweep(const Profile& p, double t, const std::vector<double>& x, const std::vector<std::size_t>& order,
           double x_edge, const std::function<ZoneState(double)>& start, std::vector<ZonePoint>& out,
           int& failures, const SolveOptions& o) {
  std::vector<std::pair<double, ZoneState>> hist;
  for (std::size_t idx : order) {
    ZoneState seed, step;
    if (hist.empty()) {
      const double dx = std::abs(x[idx] - x_edge);
      seed = start(dx);
      const ZoneState edge_like = start(0.25 * dx);
      step = step_between(edge_like, seed);
    } else if (hist.size() == 1) {
      seed = hist.back().second;
      const ZoneState probe = start(std::abs(x[idx] - x_edge));
      step = step_between(probe, seed);
      if (ordered(p, probe)) seed = probe;
    } else {
      const auto& [xa, a] = hist[hist.size() - 2];
      const auto& [xb, b] = hist.back();
      seed = extrapolate(a, b, xa, xb, x[idx]);
      step = step_between(b, seed);
      if (!ordered(p, seed)) seed = b;
    }
    ZonePoint z = solve_point(p, x[idx], t, seed, step, o);
    if (!z.converged) ++failures;
    else hist.emplace_back(x[idx], state_of(z));
    out[idx] = z;
  }
}

}  // namespace

ZoneSolution solve_zone(const Profile& p, double t, int nx, const ZoneOptions& o) {
  ZoneSolution zs;
  zs.t = t;
  if (o.leading_seed && o.trailing_seed) {
    zs.leading = leading_edge(p, t, o.leading_seed, o.solve);
    zs.trailing = trailing_edge(p, t, o.trailing_seed, o.solve);
  } else {
    const EdgeTrack tr = edge_track(p, edge_track_times(p, t), o.solve);
    zs.leading = tr.leading.back();
    zs.trailing = tr.trailing.back();
  }
  if (!zs.leading.converged || !zs.trailing.converged) throw ConvergenceError("zone: edge solve failed");
  const std::vector<double> x = zone_grid(zs.leading.x_edge, zs.trailing.x_edge, nx, o.edge_fraction);
  zs.points.resize(x.size());
  const std::size_t half = x.size() / 2;
  std::vector<std::size_t> left(half), right(x.size() - half);
  for (std::size_t i = 0; i < half; ++i) left[i] = i;
  for (std::size_t i = 0; i < right.size(); ++i) right[i] = x.size() - 1 - i;
  sweep(p, t, x, left, zs.leading.x_edge,
        [&](double dx) { return leading_start(p, zs.leading, t, dx); }, zs.points, zs.failures, o.solve);
  sweep(p, t, x, right, zs.trailing.x_edge,
        [&](double dx) { return trailing_start(p, zs.trailing, t, dx); }, zs.points, zs.failures, o.solve);

  // Regime switch: bisection on the label of beta_3 between neighbouring points.
  const double xm = p.minimum_location();
  for (std::size_t i = 0; i + 1 < zs.points.size(); ++i) {
    const ZonePoint &a = zs.points[i], &b = zs.points[i + 1];
    if (!a.converged || !b.converged) continue;
    if ((a.triple.x3 > xm) == (b.triple.x3 > xm)) continue;
    double xa = a.triple.x, xb = b.triple.x;
    ZoneState sa = state_of(a), sb = state_of(b);
    for (int k = 0; k < 40 && xb - xa > 1e-12; ++k) {
      const double xmid = 0.5 * (xa + xb);
      const ZoneState seed = extrapolate(sa, sb, xa, xb, xmid);
      const ZonePoint z = solve_point(p, xmid, t, seed, step_between(sa, sb), o.solve);
      if (!z.converged) break;
      if ((z.triple.x3 > xm) == (a.triple.x3 > xm)) {
        xa = xmid;
        sa = state_of(z);
      } else {
        xb = xmid;
        sb = state_of(z);
      }
    }
    zs.x_T = 0.5 * (xa + xb);
    break;
  }
  return zs;
}

}  // namespace kdvw
