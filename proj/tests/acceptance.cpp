#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kdvw/asymptotic.hpp"
#include "kdvw/compare.hpp"
#include "kdvw/config.hpp"
#include "kdvw/elliptic.hpp"
#include "kdvw/kdv.hpp"
#include "kdvw/pipeline.hpp"
#include "kdvw/whitham.hpp"
#include "phase_cases.hpp"

using namespace kdvw;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
    pass = pass && ok;
  }
  void note(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    lines.push_back(std::string("     ") + buf);
  }
};

bool all_ok = true;

void report(int n, const char* name, const Outcome& o, double seconds) {
  std::printf("criterion %d: %s  %s (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", name, seconds);
  for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
  std::fflush(stdout);
  all_ok = all_ok && o.pass;
}

template <class F>
Outcome timed(F&& f, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = f();
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

double soliton(double x, double t, double x0) { return 2.0 / std::pow(std::cosh(x - x0 - 4.0 * t), 2); }

double rel(double v, double ref) { return std::abs(v - ref) / std::abs(ref); }

// Sech^2 given only by callables, so every profile quantity goes through quadrature.
FunctionProfile generic_sech2() {
  return FunctionProfile(
      "sech2-generic", [](double x) { return -1.0 / std::pow(std::cosh(x), 2); },
      [](double x) { return 2.0 * std::tanh(x) / std::pow(std::cosh(x), 2); });
}

// Criterion 9 ---------------------------------------------------------------

Outcome properties() {
  Outcome o;
  const Sech2Profile p;

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-0.95, -0.05);
  double sym = 0.0;
  for (int i = 0; i < 5; ++i) {
    std::array<double, 3> b{u(rng), u(rng), u(rng)};
    std::sort(b.begin(), b.end(), std::greater<>());
    const double q0 = q_phase(p, make_triple(p, b));
    std::array<int, 3> perm{0, 1, 2};
    do {
      sym = std::max(sym, std::abs(testdata::q_raw(b[perm[0]], b[perm[1]], b[perm[2]]) - q0));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  o.check(sym < 1e-9, "q under argument permutations: max dev %.2e (< 1e-9)", sym);

  double diag = 0.0;
  for (double b : {-0.9, -0.7, -0.5, -0.3, -0.1}) {
    const double f = p.inverse(b, Branch::decreasing);
    diag = std::max(diag, rel(q_phase(p, make_triple(p, {b, b, b})), f));
  }
  o.check(diag < 1e-12, "q(b,b,b) = f_-(b): max rel dev %.2e (< 1e-12)", diag);

  std::mt19937 rng2(3);
  std::uniform_real_distribution<double> xs(-3.0, 0.0), es(0.005, 0.1);
  double forms = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::array<double, 3> b{u(rng2), u(rng2), u(rng2)};
    std::sort(b.begin(), b.end(), std::greater<>());
    const auto w = make_triple(p, b);
    const double q = q_phase(p, w), x = xs(rng2), eps = es(rng2);
    forms = std::max(forms, std::abs(u_elliptic(w, q, x, 0.4, eps) - u_elliptic_theta(w, q, x, 0.4, eps)));
  }
  o.check(forms < 1e-10, "dn form vs theta form: max dev %.2e (< 1e-10)", forms);

  double leg = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double s = i / 21.0, s1 = std::sqrt(1 - s * s);
    const auto a = elliptic_KE(s), b = elliptic_KE(s1);
    leg = std::max(leg, std::abs(a.E * b.K + b.E * a.K - a.K * b.K - pi / 2));
  }
  o.check(leg < 1e-12, "Legendre relation at 20 moduli: max dev %.2e (< 1e-12)", leg);

  KdvSolver s(512, 5.0, 0.1);
  SpectralField f = s.init([&](double x) { return p.value(x); });
  const auto m0 = f.modes[0];
  for (int i = 0; i < 400; ++i) s.step(f, 1e-3);
  const double mass = std::abs(f.modes[0] - m0);
  o.check(mass < 1e-13, "mass mode drift over 400 steps: %.2e (< 1e-13)", mass);

  auto run = [&](long steps) {
    KdvSolver ks(2048, 10.0, 1.0);
    const auto r = ks.evolve(ks.init([](double x) { return soliton(x, 0.0, -5.0); }), 1.0, 1.0 / steps);
    const auto x = ks.grid();
    const auto v = ks.physical(r.field);
    double e = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) e = std::max(e, std::abs(v[j] - soliton(x[j], 1.0, -5.0)));
    return e;
  };
  const double ratio = run(600) / run(1200);
  o.check(std::abs(ratio - 16.0) <= 3.0, "soliton error ratio dt -> dt/2: %.2f (16 +- 3)", ratio);
  return o;
}

// Criterion 1 ---------------------------------------------------------------

Outcome constants() {
  Outcome o;
  const double tc = std::sqrt(3.0) / 8, xc = -std::sqrt(3.0) / 2 + std::log((std::sqrt(3.0) - 1) / std::sqrt(2.0));
  const double T = pi / (6 * std::sqrt(3.0)), xT = -pi / std::sqrt(3.0);
  const Sech2Profile closed;
  const auto generic = generic_sech2();
  for (const Profile* p : {static_cast<const Profile*>(&closed), static_cast<const Profile*>(&generic)}) {
    const auto c = critical_point(*p);
    const double dc = std::max({std::abs(c.t - tc), std::abs(c.x - xc), std::abs(c.u + 2.0 / 3.0)});
    o.check(dc < 1e-6, "%s critical point (%.9f, %.9f, %.9f): max dev %.2e (< 1e-6)", p->name().c_str(), c.t, c.x,
            c.u, dc);
    const auto h = hump_time(*p);
    const double dh = std::max({std::abs(h.T - T), std::abs(h.x_T - xT), std::abs(h.beta1_at_T + 0.25)});
    o.check(dh < 1e-6, "%s hump time (%.9f, %.9f, %.9f): max dev %.2e (< 1e-6)", p->name().c_str(), h.T, h.x_T,
            h.beta1_at_T, dh);
  }
  return o;
}

// Criterion 2 ---------------------------------------------------------------

Outcome soliton_run() {
  Outcome o;
  const double L = 10.0, x0 = -L;
  KdvSolver s(2048, L, 1.0);
  std::vector<double> times;
  for (int i = 1; i <= 10; ++i) times.push_back(0.5 * i);
  const auto r = s.evolve(s.init([&](double x) { return soliton(x, 0.0, x0); }), 5.0, 5.0 / 4000, times);
  const auto x = s.grid();
  double err = 0.0;
  for (const auto& snap : r.snapshots)
    for (std::size_t j = 0; j < x.size(); ++j) err = std::max(err, std::abs(snap.u[j] - soliton(x[j], snap.t, x0)));
  double drift = 0.0;
  for (double e : r.energy.err) drift = std::max(drift, std::abs(e));
  o.check(r.steps == 4000, "steps taken: %ld", r.steps);
  o.check(err < 1e-5, "max pointwise error %.2e (< 1e-5)", err);
  o.check(drift <= 10 * err, "max |energy err| %.2e (<= 10 x pointwise error)", drift);
  return o;
}

// Shared KdV runs at t = 0.4 with the table parameters ------------------------

struct Run {
  double eps = 0.0;
  KdvRun kdv;
};

std::map<double, Run> runs;

const Run& run_at(double neg_log_eps) {
  auto it = runs.find(neg_log_eps);
  if (it != runs.end()) return it->second;
  const Sech2Profile p;
  const auto* row = table1_row(std::pow(10.0, -neg_log_eps));
  const KdvParams k{1 << row->log2n, row->L, row->dt};
  const double eps = std::pow(10.0, -neg_log_eps);
  std::fprintf(stderr, "  kdv eps = 10^-%.2f, N = 2^%d, L = %g, dt = %g\n", neg_log_eps, row->log2n, row->L, row->dt);
  const std::array<double, 1> t{0.4};
  return runs.emplace(neg_log_eps, Run{eps, run_kdv(p, eps, k, t, 0.4)}).first->second;
}

// Criterion 3 ---------------------------------------------------------------

Outcome table_drift(bool long_runs) {
  Outcome o;
  for (const auto& row : table1()) {
    if (row.neg_log_eps == 1.25 || row.neg_log_eps == 1.75) continue;
    if (row.neg_log_eps > 2.25 && !long_runs) continue;
    const auto& r = run_at(row.neg_log_eps);
    const double e = std::log10(std::abs(energy_error_at(r.kdv.energy, 0.4)));
    o.check(std::abs(e - row.log_err) <= 1.0, "eps = 10^-%.2f: log10|err| = %.2f (printed %.2f +- 1)", row.neg_log_eps,
            e, row.log_err);
  }
  return o;
}

// Criterion 4 ---------------------------------------------------------------

ZoneSolution zone300;

Outcome zone_residuals() {
  Outcome o;
  const Sech2Profile p;
  ZoneOptions zo;
  zo.solve.precision = true;
  zone300 = solve_zone(p, 0.4, 300, zo);
  double worst = 0.0;
  int accepted = 0;
  for (const auto& pt : zone300.points)
    if (pt.converged) {
      ++accepted;
      worst = std::max(worst, pt.sum_sq);
    }
  o.check(accepted > 0 && worst < 1e-12, "%d accepted points: max sum of squares %.2e (< 1e-12)", accepted, worst);
  o.note("%d of %zu grid points not accepted", zone300.failures, zone300.points.size() + zone300.failures);
  return o;
}

// Criterion 5 ---------------------------------------------------------------

Outcome phase_identity() {
  Outcome o;
  const Sech2Profile p;
  double worst[2] = {0.0, 0.0};
  for (const auto& c : testdata::phase_cases) {
    const auto reg = c.regime == 1 ? Regime::x3_negative : Regime::x3_positive;
    const double d = std::abs(q_phase(p, make_triple(p, {c.b1, c.b2, c.b3}, reg)) - c.phi);
    worst[c.regime - 1] = std::max(worst[c.regime - 1], d);
  }
  o.check(worst[0] < 1e-8, "10 triples before the hump crossing: max |phi - q| %.2e (< 1e-8)", worst[0]);
  o.check(worst[1] < 1e-8, "10 triples after the hump crossing: max |phi - q| %.2e (< 1e-8)", worst[1]);
  return o;
}

// Criterion 6 ---------------------------------------------------------------

Outcome edge_regularity() {
  Outcome o;
  const Sech2Profile p;
  ZoneOptions zo;
  zo.leading_seed = EdgeSeed{zone300.leading.beta_outer, zone300.leading.beta_double, 0.0};
  zo.trailing_seed = EdgeSeed{zone300.trailing.beta_outer, zone300.trailing.beta_double, zone300.trailing.x3};
  std::vector<double> left, right;
  double c0 = 0.0;
  bool solved = true;
  for (double f : {1e-2, 1e-4, 1e-6}) {
    zo.edge_fraction = f;
    const auto z = solve_zone(p, 0.4, 12, zo);
    if (z.failures > 0 || z.points.empty()) {
      solved = false;
      break;
    }
    const Composite c(p, z);
    const double xm = z.leading.x_edge, xp = z.trailing.x_edge;
    for (double eps : {0.1, 0.01}) {
      c0 = std::max(c0, std::abs(c.at(xm, eps).u_app - c.hopf_at(xm, Region::outside_left).u));
      c0 = std::max(c0, std::abs(c.at(xp, eps).u_app - c.hopf_at(xp, Region::outside_right).u));
      const double h = 1e-12;
      c0 = std::max(c0, std::abs(c.at(xm - h, eps).u_app - c.at(xm + h, eps).u_app));
      c0 = std::max(c0, std::abs(c.at(xp - h, eps).u_app - c.at(xp + h, eps).u_app));
    }
    const auto& a = z.points.front().triple;
    const auto& b = z.points.back().triple;
    left.push_back(std::abs(envelope(a).upper - z.leading.beta_outer) / (a.x - xm));
    right.push_back(std::abs(envelope(b).lower - z.trailing.beta_outer) / (xp - b.x));
    o.note("edge layer %.0e: inside slopes %.3e (leading), %.3e (trailing)", f, left.back(), right.back());
  }
  o.check(solved, "zones solved at edge layers %s", "1e-2, 1e-4, 1e-6");
  if (!solved) return o;
  o.check(c0 < 1e-6, "edge value mismatch %.2e (< 1e-6)", c0);
  for (const auto* s : {&left, &right}) {
    const auto& v = *s;
    const bool mono = v[1] > v[0] && v[2] > v[1];
    o.check(mono && v[2] >= 10 * v[0], "%s slope growth over two levels: %.1fx, monotone %s (>= 10x)",
            s == &left ? "leading" : "trailing", v[2] / v[0], mono ? "yes" : "no");
  }
  return o;
}

// Criterion 7 ---------------------------------------------------------------

struct Target {
  const char* name;
  double Metrics::*field;
  double slope, tol;
};

Outcome scaling(bool long_runs) {
  Outcome o;
  const Sech2Profile p;
  const Composite c(p, zone300);
  std::vector<double> eps;
  std::vector<Metrics> m;
  const double last = long_runs ? 3.0 : 2.0;
  for (double k = 1.0; k <= last + 1e-9; k += 0.25) {
    const auto& r = run_at(k);
    const auto cmp = compare_snapshot(c, r.kdv.x, r.kdv.snapshots.at(0).u, r.eps);
    eps.push_back(r.eps);
    m.push_back(cmp.metrics);
    o.note("eps = 10^-%.2f: err_mid %.4g, err- %.4g, err+ %.4g, D- %.4g, D+ %.4g", k, cmp.metrics.err_mid,
           cmp.metrics.err_hopf_minus, cmp.metrics.err_hopf_plus, cmp.metrics.delta_minus, cmp.metrics.delta_plus);
  }
  // Short range: widened tolerances; full range: twice the published sigma.
  const std::array<Target, 4> targets =
      long_runs ? std::array<Target, 4>{{{"err_mid", &Metrics::err_mid, 1.0049, 0.10},
                                         {"err-", &Metrics::err_hopf_minus, 0.346, 0.050},
                                         {"err+", &Metrics::err_hopf_plus, 0.525, 0.034},
                                         {"D-", &Metrics::delta_minus, 0.761, 0.056}}}
                : std::array<Target, 4>{{{"err_mid", &Metrics::err_mid, 1.00, 0.15},
                                         {"err-", &Metrics::err_hopf_minus, 0.35, 0.10},
                                         {"err+", &Metrics::err_hopf_plus, 0.53, 0.10},
                                         {"D-", &Metrics::delta_minus, 0.76, 0.12}}};
  auto fit = [&](double Metrics::*field) {
    std::vector<double> v;
    for (const auto& mm : m) v.push_back(mm.*field);
    return scaling_fit(eps, v);
  };
  for (const auto& t : targets) {
    const auto f = fit(t.field);
    o.check(std::abs(f.slope - t.slope) <= t.tol, "%s slope %.4f +- %.4f (%.3f +- %.3f)", t.name, f.slope,
            f.sigma_slope, t.slope, t.tol);
    o.check(f.r >= 0.99, "%s r = %.4f (>= 0.99)", t.name, f.r);
  }
  const auto d = fit(&Metrics::delta_plus);
  o.check(d.r < 0.99, "D+ r = %.4f (< 0.99, no power law), slope %.3f", d.r, d.slope);
  return o;
}

// Criterion 8 ---------------------------------------------------------------

Outcome degenerate_speeds() {
  Outcome o;
  const Sech2Profile p;
  const double gap = 1e-10;
  for (auto [b1, b3] : {std::pair{-0.3, -0.8}, std::pair{-0.1, -0.6}}) {
    const auto t = speeds(make_triple(p, {b1, b1 - gap, b3}));
    const double v12 = 4 * b1 + 2 * b3, v3 = 6 * b3;
    o.check(std::max(rel(t[0], v12), rel(t[1], v12)) < 1e-6,
            "(%g, %g): b1 - b2 = 1e-10, v1 = %.10f, v2 = %.10f vs 4b1 + 2b3 = %g", b1, b3, t[0], t[1], v12);
    o.check(rel(t[2], v3) < 1e-6, "(%g, %g): b1 - b2 = 1e-10, v3 = %.10f vs 6b3 = %g, rel dev %.2e", b1, b3, t[2], v3,
            rel(t[2], v3));

    const auto l = speeds(make_triple(p, {b1, b3 + gap, b3}));
    const double v1 = 6 * b1, printed = 12 * b1 - 6 * b3, corrected = 12 * b3 - 6 * b1;
    o.check(rel(l[0], v1) < 1e-6, "(%g, %g): b2 - b3 = 1e-10, v1 = %.10f vs 6b1 = %g", b1, b3, l[0], v1);
    o.check(std::max(rel(l[1], printed), rel(l[2], printed)) < 1e-6,
            "(%g, %g): b2 - b3 = 1e-10, v2 = %.10f, v3 = %.10f vs 12b1 - 6b3 = %g", b1, b3, l[1], l[2], printed);
    o.note("12b3 - 6b1 = %g: rel dev %.2e, %.2e", corrected, rel(l[1], corrected), rel(l[2], corrected));
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool long_runs = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--long") == 0) {
      long_runs = true;
    } else {
      std::fprintf(stderr, "usage: %s [--long]\n", argv[0]);
      return 2;
    }
  }

  double sec = 0.0;
  std::fprintf(stderr, "property suites\n");
  const Outcome props = timed(properties, sec);
  const double props_sec = sec;
  auto gated = [&](int n, const char* name, auto f) {
    if (!props.pass) {
      Outcome o;
      o.check(false, "not attempted: %s", "property suites failed");
      report(n, name, o, 0.0);
      return;
    }
    std::fprintf(stderr, "criterion %d\n", n);
    const Outcome o = timed(f, sec);
    report(n, name, o, sec);
  };

  gated(1, "analytic constants", constants);
  gated(2, "soliton fidelity", soliton_run);
  gated(3, "energy drift against the parameter table", [&] { return table_drift(long_runs); });
  gated(4, "hodograph residuals at t = 0.4", zone_residuals);
  gated(5, "phase identity", phase_identity);
  gated(6, "edge continuity without C1", [&] {
    if (zone300.points.empty()) {
      Outcome o;
      o.check(false, "no zone at t = %g", 0.4);
      return o;
    }
    return edge_regularity();
  });
  gated(7, "scaling exponents at t = 0.4", [&] {
    if (zone300.points.empty()) {
      Outcome o;
      o.check(false, "no zone at t = %g", 0.4);
      return o;
    }
    return scaling(long_runs);
  });
  gated(8, "degenerate speed limits", degenerate_speeds);
  report(9, "property suites", props, props_sec);

  std::printf("%s\n", all_ok ? "all criteria pass" : "some criteria fail");
  return all_ok ? 0 : 1;
}
