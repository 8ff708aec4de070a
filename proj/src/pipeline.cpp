#include "kdvw/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <thread>

#include "kdvw/errors.hpp"
#include "kdvw/svg.hpp"

namespace kdvw {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string printf_number(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double region_code(Region r) {
  return r == Region::outside_left ? -1.0 : r == Region::outside_right ? 1.0 : 0.0;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t nt = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < nt; ++k)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  for (auto& th : pool) th.join();
}

KeyValues config_entries(const ExperimentConfig& c) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
  };
  KeyValues kv{{"config.profile", c.profile},
               {"config.epsilon", list(c.epsilons)},
               {"config.times", list(c.times)},
               {"config.tmax", format_number(final_time(c))},
               {"config.nx-whitham", std::to_string(c.nx_whitham)},
               {"config.precision", c.precision ? "true" : "false"},
               {"config.long", c.long_runs ? "true" : "false"}};
  for (double e : c.epsilons) {
    const auto k = kdv_params(c, e);
    const std::string base = "config." + eps_tag(e) + ".";
    kv.emplace_back(base + "nmodes", std::to_string(k.n));
    kv.emplace_back(base + "L", format_number(k.L));
    kv.emplace_back(base + "dt", format_number(k.dt));
  }
  return kv;
}

struct ZoneJob {
  double t = 0.0;
  std::optional<ZoneSolution> zone;
  std::optional<Composite> composite;
  SubRun status;
  std::vector<Artifact> artifacts;
};

struct EntryJob {
  double eps = 0.0;
  std::vector<std::pair<double, Metrics>> metrics;
  std::vector<SubRun> status;
  std::vector<Artifact> artifacts;
};

Artifact record(const fs::path& dir, const std::string& name, std::string kind, std::optional<double> eps,
                std::optional<double> t) {
  return {name, std::move(kind), eps, t, sha256_file(dir / name)};
}

Table zone_table(const ZoneSolution& z) {
  Table tab;
  std::vector<double> x, b1, b2, b3, x3, q, ss, ok, ev;
  for (const auto& p : z.points) {
    x.push_back(p.triple.x);
    b1.push_back(p.triple.beta[0]);
    b2.push_back(p.triple.beta[1]);
    b3.push_back(p.triple.beta[2]);
    x3.push_back(p.triple.x3);
    q.push_back(p.q);
    ss.push_back(p.sum_sq);
    ok.push_back(p.converged ? 1.0 : 0.0);
    ev.push_back(p.evaluations);
  }
  tab.meta = {{"t", format_number(z.t)},
              {"x_minus", format_number(z.leading.x_edge)},
              {"x_plus", format_number(z.trailing.x_edge)},
              {"failures", std::to_string(z.failures)}};
  tab.add("x", x);
  tab.add("beta1", b1);
  tab.add("beta2", b2);
  tab.add("beta3", b3);
  tab.add("x3", x3);
  tab.add("q", q);
  tab.add("sum_sq", ss);
  tab.add("converged", ok);
  tab.add("evaluations", ev);
  return tab;
}

KeyValues edge_entries(const ZoneSolution& z) {
  KeyValues kv{{"t", format_number(z.t)}};
  for (const auto* e : {&z.leading, &z.trailing}) {
    const std::string b = e->kind == EdgeKind::leading ? "leading." : "trailing.";
    kv.emplace_back(b + "x_edge", format_number(e->x_edge));
    kv.emplace_back(b + "beta_outer", format_number(e->beta_outer));
    kv.emplace_back(b + "beta_double", format_number(e->beta_double));
    kv.emplace_back(b + "x3", format_number(e->x3));
    kv.emplace_back(b + "converged", e->converged ? "true" : "false");
  }
  kv.emplace_back("x_T", z.x_T ? format_number(*z.x_T) : "none");
  return kv;
}

KeyValues metrics_entries(const Metrics& m, double energy_err, const KdvParams& k) {
  return {{"eps", format_number(m.eps)},
          {"t", format_number(m.t)},
          {"nmodes", std::to_string(k.n)},
          {"L", format_number(k.L)},
          {"dt", format_number(k.dt)},
          {"energy_err", format_number(energy_err)},
          {"x_minus", format_number(m.x_minus)},
          {"x_plus", format_number(m.x_plus)},
          {"err_mid", format_number(m.err_mid)},
          {"err_mid_window_half_width", format_number(m.mid_half_width)},
          {"err_left_edge", format_number(m.err_left_edge)},
          {"err_right_edge", format_number(m.err_right_edge)},
          {"err_hopf_minus", format_number(m.err_hopf_minus)},
          {"err_hopf_plus", format_number(m.err_hopf_plus)},
          {"x_err_hopf_plus", format_number(m.x_err_hopf_plus)},
          {"x_hopf_minus", format_number(m.hopf_minus.x)},
          {"x_hopf_minus_at_domain_end", m.hopf_minus.at_domain_end ? "true" : "false"},
          {"x_hopf_plus", format_number(m.hopf_plus.x)},
          {"x_hopf_plus_at_domain_end", m.hopf_plus.at_domain_end ? "true" : "false"},
          {"delta_minus", format_number(m.delta_minus)},
          {"delta_plus", format_number(m.delta_plus)}};
}

void run_entry(const Profile& p, const ExperimentConfig& c, double eps, const std::vector<double>& times,
               double t_c, const std::vector<ZoneJob>& zones, const fs::path& dir, EntryJob& job) {
  job.eps = eps;
  const auto k = kdv_params(c, eps);
  KdvRun run;
  try {
    run = run_kdv(p, eps, k, times, final_time(c));
  } catch (const std::exception& e) {
    job.status.push_back({"kdv", eps, std::nullopt, false, e.what()});
    return;
  }
  job.status.push_back({"kdv", eps, std::nullopt, true, ""});

  Table en;
  en.meta = {{"eps", format_number(eps)}, {"nmodes", std::to_string(k.n)}, {"L", format_number(k.L)},
             {"dt", format_number(k.dt)}};
  en.add("t", run.energy.times);
  en.add("E", run.energy.E);
  en.add("err", run.energy.err);
  const std::string en_name = "energy_" + eps_tag(eps) + ".dat";
  write_table(dir / en_name, en);
  job.artifacts.push_back(record(dir, en_name, "energy", eps, std::nullopt));

  for (std::size_t si = 0; si < run.snapshots.size(); ++si) {
    const auto& snap = run.snapshots[si];
    const double t = times[si];
    const std::string stem = eps_tag(eps) + "_" + time_tag(t);
    try {
      Table tab;
      tab.meta = {{"eps", format_number(eps)}, {"t", format_number(t)}, {"nmodes", std::to_string(k.n)},
                  {"L", format_number(k.L)}, {"dt", format_number(k.dt)}};
      std::optional<Metrics> metrics;
      const ZoneJob* zj = nullptr;
      for (const auto& z : zones)
        if (z.t == t) zj = &z;
      tab.add("x", run.x);
      tab.add("u_kdv", snap.u);
      if (t <= t_c) {
        const auto u = hopf_before_breaking(p, run.x, t);
        std::vector<double> d(u.size()), region(u.size(), -1.0), nan(u.size(), kNaN);
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = snap.u[i] - u[i];
        tab.meta.emplace_back("zone", "none");
        tab.add("u_app", u);
        tab.add("diff", d);
        tab.add("region", region);
        tab.add("env_lower", nan);
        tab.add("env_upper", nan);
      } else if (zj && zj->composite) {
        const auto cmp = compare_snapshot(*zj->composite, run.x, snap.u, eps);
        tab.meta.emplace_back("zone", "whitham");
        tab.meta.emplace_back("x_minus", format_number(cmp.metrics.x_minus));
        tab.meta.emplace_back("x_plus", format_number(cmp.metrics.x_plus));
        std::vector<double> region;
        for (auto r : cmp.diff.region) region.push_back(region_code(r));
        tab.add("u_app", cmp.u_app);
        tab.add("diff", cmp.diff.diff);
        tab.add("region", region);
        tab.add("env_lower", cmp.env_lower);
        tab.add("env_upper", cmp.env_upper);
        metrics = cmp.metrics;
      } else {
        throw Error("no Whitham zone available at this time");
      }
      const std::string s_name = "snapshot_" + stem + ".dat";
      write_table(dir / s_name, tab);
      job.artifacts.push_back(record(dir, s_name, "snapshot", eps, t));
      if (metrics) {
        const std::string m_name = "metrics_" + stem + ".txt";
        write_key_values(dir / m_name, metrics_entries(*metrics, energy_error_at(run.energy, t), k));
        job.artifacts.push_back(record(dir, m_name, "metrics", eps, t));
        job.metrics.emplace_back(t, *metrics);
      }
      job.status.push_back({"compare", eps, t, true, ""});
    } catch (const std::exception& e) {
      job.status.push_back({"compare", eps, t, false, e.what()});
    }
  }
}

}  // namespace

std::string eps_tag(double eps) { return "e" + printf_number("%.4g", -std::log10(eps)); }
std::string time_tag(double t) { return "t" + printf_number("%.6g", t); }

KdvRun run_kdv(const Profile& p, double eps, const KdvParams& k, std::span<const double> times, double tmax) {
  KdvSolver s(k.n, k.L, eps);
  auto f = s.init([&](double x) { return p.value(x); });
  auto r = s.evolve(std::move(f), tmax, k.dt, std::vector<double>(times.begin(), times.end()));
  KdvRun out;
  out.eps = eps;
  out.params = k;
  out.x = s.grid();
  out.snapshots = std::move(r.snapshots);
  out.energy = std::move(r.energy);
  return out;
}

double energy_error_at(const EnergyTrace& e, double t) {
  if (e.times.empty()) throw DomainError("energy trace is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.times.size(); ++i)
    if (std::abs(e.times[i] - t) < std::abs(e.times[best] - t)) best = i;
  return e.err[best];
}

std::vector<double> hopf_before_breaking(const Profile& p, std::span<const double> x, double t) {
  if (t > critical_point(p).t) throw DomainError("hopf_before_breaking: t is past breaking");
  const double umin = p.minimum_value();
  std::vector<double> u;
  u.reserve(x.size());
  for (double v : x) {
    // 6 t u0(xi) + xi is increasing before breaking, with the root in [x, x - 6 t umin].
    double lo = v, hi = v - 6.0 * t * umin;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
      const double mid = 0.5 * (lo + hi);
      (6.0 * t * p.value(mid) + mid - v < 0.0 ? lo : hi) = mid;
    }
    u.push_back(p.value(0.5 * (lo + hi)));
  }
  return u;
}

Comparison compare_snapshot(const Composite& c, std::span<const double> x, std::span<const double> u_kdv,
                            double eps) {
  Comparison out;
  out.diff = difference(x, u_kdv, c, eps);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.u_app.push_back(u_kdv[i] - out.diff.diff[i]);
    if (out.diff.region[i] == Region::whitham) {
      const auto env = envelope(c.zone().triple_at(x[i]));
      out.env_lower.push_back(env.lower);
      out.env_upper.push_back(env.upper);
    } else {
      out.env_lower.push_back(kNaN);
      out.env_upper.push_back(kNaN);
    }
  }
  out.metrics = error_metrics(out.diff, edge_wavelengths(c, eps));
  return out;
}

std::span<const ScalingQuantity> scaling_quantities() {
  static const ScalingQuantity q[] = {
      {"err_mid", &Metrics::err_mid},
      {"err_left_edge", &Metrics::err_left_edge},
      {"err_right_edge", &Metrics::err_right_edge},
      {"err_hopf_minus", &Metrics::err_hopf_minus},
      {"err_hopf_plus", &Metrics::err_hopf_plus},
      {"delta_minus", &Metrics::delta_minus},
      {"delta_plus", &Metrics::delta_plus},
  };
  return q;
}

RunReport run_experiment(const ExperimentConfig& c) {
  validate(c);
  const fs::path dir = c.out;
  fs::create_directories(dir);
  const auto profile = make_profile(c.profile);
  const Profile& p = *profile;
  const double t_c = critical_point(p).t;
  const int workers = c.workers > 0 ? c.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  std::vector<double> times = c.times;
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<ZoneJob> zones;
  for (double t : times)
    if (t > t_c) zones.push_back({t, {}, {}, {"whitham", std::nullopt, t, true, ""}, {}});
  parallel_for(zones.size(), workers, [&](std::size_t i) {
    auto& job = zones[i];
    try {
      ZoneOptions o;
      o.solve.precision = c.precision;
      job.zone = solve_zone(p, job.t, c.nx_whitham, o);
      const std::string zn = "zone_" + time_tag(job.t) + ".dat", en = "edges_" + time_tag(job.t) + ".txt";
      write_table(dir / zn, zone_table(*job.zone));
      write_key_values(dir / en, edge_entries(*job.zone));
      job.artifacts.push_back(record(dir, zn, "zone", std::nullopt, job.t));
      job.artifacts.push_back(record(dir, en, "edges", std::nullopt, job.t));
      job.composite.emplace(p, *job.zone);
      if (job.zone->failures > 0) {
        job.status.ok = false;
        job.status.message = std::to_string(job.zone->failures) + " zone points did not converge";
      }
    } catch (const std::exception& e) {
      job.status.ok = false;
      job.status.message = e.what();
    }
  });

  std::vector<EntryJob> entries(c.epsilons.size());
  parallel_for(entries.size(), workers,
               [&](std::size_t i) { run_entry(p, c, c.epsilons[i], times, t_c, zones, dir, entries[i]); });

  RunReport rep;
  for (auto& z : zones) {
    rep.runs.push_back(z.status);
    rep.artifacts.insert(rep.artifacts.end(), z.artifacts.begin(), z.artifacts.end());
  }
  for (auto& e : entries) {
    rep.runs.insert(rep.runs.end(), e.status.begin(), e.status.end());
    rep.artifacts.insert(rep.artifacts.end(), e.artifacts.begin(), e.artifacts.end());
  }

  // Sweep tables and fits per snapshot time.
  for (double t : times) {
    std::vector<std::pair<double, Metrics>> rows;
    for (const auto& e : entries)
      for (const auto& [tm, m] : e.metrics)
        if (tm == t) rows.emplace_back(e.eps, m);
    if (rows.empty()) continue;
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    Table tab;
    tab.meta = {{"t", format_number(t)}};
    std::vector<double> eps;
    for (const auto& r : rows) eps.push_back(r.first);
    tab.add("eps", eps);
    KeyValues fits{{"t", format_number(t)}, {"n_points", std::to_string(rows.size())}};
    for (const auto& q : scaling_quantities()) {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(r.second.*q.field);
      tab.add(q.name, v);
      const std::string b = std::string(q.name) + ".";
      try {
        const auto f = scaling_fit(eps, v);
        fits.emplace_back(b + "slope", format_number(f.slope));
        fits.emplace_back(b + "intercept", format_number(f.intercept));
        fits.emplace_back(b + "sigma_slope", format_number(f.sigma_slope));
        fits.emplace_back(b + "sigma_intercept", format_number(f.sigma_intercept));
        fits.emplace_back(b + "r", format_number(f.r));
        fits.emplace_back(b + "reportable", reportable(f) ? "true" : "false");
      } catch (const DomainError& e) {
        fits.emplace_back(b + "fit", std::string("none: ") + e.what());
      }
    }
    const std::string sn = "scaling_" + time_tag(t) + ".dat", fn = "fits_" + time_tag(t) + ".txt";
    write_table(dir / sn, tab);
    write_key_values(dir / fn, fits);
    rep.artifacts.push_back(record(dir, sn, "scaling", std::nullopt, t));
    rep.artifacts.push_back(record(dir, fn, "fits", std::nullopt, t));
  }

  try {
    for (const auto& f : plot_directory(dir))
      rep.artifacts.push_back(record(dir, f.filename().string(), "plot", std::nullopt, std::nullopt));
    rep.runs.push_back({"plot", std::nullopt, std::nullopt, true, ""});
  } catch (const std::exception& e) {
    rep.runs.push_back({"plot", std::nullopt, std::nullopt, false, e.what()});
  }

  rep.exit_code = std::all_of(rep.runs.begin(), rep.runs.end(), [](const SubRun& r) { return r.ok; }) ? 0 : 1;
  KeyValues man = config_entries(c);
  man.emplace_back("status", rep.exit_code == 0 ? "complete" : "partial");
  for (std::size_t i = 0; i < rep.artifacts.size(); ++i) {
    const auto& a = rep.artifacts[i];
    const std::string b = "artifact." + std::to_string(i) + ".";
    man.emplace_back(b + "path", a.path);
    man.emplace_back(b + "kind", a.kind);
    if (a.eps) man.emplace_back(b + "eps", format_number(*a.eps));
    if (a.t) man.emplace_back(b + "t", format_number(*a.t));
    man.emplace_back(b + "sha256", a.sha256);
  }
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const auto& r = rep.runs[i];
    const std::string b = "run." + std::to_string(i) + ".";
    man.emplace_back(b + "stage", r.stage);
    if (r.eps) man.emplace_back(b + "eps", format_number(*r.eps));
    if (r.t) man.emplace_back(b + "t", format_number(*r.t));
    man.emplace_back(b + "status", r.ok ? "ok" : "failed");
    if (!r.ok) man.emplace_back(b + "message", r.message);
  }
  write_key_values(dir / "manifest.txt", man);
  return rep;
}

// ---------------------------------------------------------------- plots

namespace {

std::vector<fs::path> tables_with_prefix(const fs::path& dir, const std::string& prefix, const std::string& ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind(prefix, 0) == 0 && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_svg(const fs::path& path, const PlotSpec& spec, std::vector<fs::path>& written) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_svg(spec);
  written.push_back(path);
}

std::optional<double> meta_number(const Table& t, const std::string& key) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return parse_number(v);
  return std::nullopt;
}

}  // namespace

std::vector<fs::path> plot_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("no such directory: " + dir.string());
  std::vector<fs::path> written;
  const auto snaps = tables_with_prefix(dir, "snapshot_", ".dat");
  const auto scal = tables_with_prefix(dir, "scaling_", ".dat");
  const auto energy = tables_with_prefix(dir, "energy_", ".dat");
  if (snaps.empty() && scal.empty() && energy.empty()) throw IoError("no tables to plot in " + dir.string());

  for (const auto& path : snaps) {
    const auto tab = read_table(path);
    const auto stem = path.stem().string().substr(std::string("snapshot_").size());
    const std::string where = "eps = " + lookup(tab.meta, "eps") + ", t = " + lookup(tab.meta, "t");
    std::vector<VRule> rules;
    if (auto xm = meta_number(tab, "x_minus")) rules.push_back({*xm, "x-"});
    if (auto xp = meta_number(tab, "x_plus")) rules.push_back({*xp, "x+"});

    PlotSpec ov{"Solution, " + where, "x", "u", {}, rules, {}};
    ov.series.push_back({tab.column("x"), tab.column("u_kdv"), "KdV", "#1f77b4", 1.0, false});
    ov.series.push_back({tab.column("x"), tab.column("u_app"), "asymptotic", "#d62728", 1.0, false});
    if (tab.has("env_lower")) {
      ov.series.push_back({tab.column("x"), tab.column("env_lower"), "envelope", "#2ca02c", 1.5, false});
      ov.series.push_back({tab.column("x"), tab.column("env_upper"), "", "#2ca02c", 1.5, false});
    }
    write_svg(dir / ("overlay_" + stem + ".svg"), ov, written);

    PlotSpec df{"Difference, " + where, "x", "u_kdv - u_app", {}, rules, {}};
    df.series.push_back({tab.column("x"), tab.column("diff"), "", "#9467bd", 1.0, false});
    write_svg(dir / ("difference_" + stem + ".svg"), df, written);
  }

  for (const auto& path : energy) {
    const auto tab = read_table(path);
    std::vector<double> le;
    for (double v : tab.column("err")) le.push_back(v == 0.0 ? kNaN : std::log10(std::abs(v)));
    PlotSpec sp{"Energy drift, eps = " + lookup(tab.meta, "eps"), "t", "log10 |1 - E/E0|", {}, {}, {}};
    sp.series.push_back({tab.column("t"), le, "", "#1f77b4", 1.0, false});
    write_svg(dir / (path.stem().string() + ".svg"), sp, written);
  }

  for (const auto& path : scal) {
    const auto tab = read_table(path);
    const auto tag = path.stem().string().substr(std::string("scaling_").size());
    KeyValues fits;
    if (fs::exists(dir / ("fits_" + tag + ".txt"))) fits = read_key_values(dir / ("fits_" + tag + ".txt"));
    const auto& eps = tab.column("eps");
    std::vector<double> z;
    for (double e : eps) z.push_back(std::log10(e));
    for (const auto& q : scaling_quantities()) {
      if (!tab.has(q.name)) continue;
      std::vector<double> y;
      for (double v : tab.column(q.name)) y.push_back(v > 0.0 ? std::log10(v) : kNaN);
      PlotSpec sp{std::string(q.name) + ", t = " + lookup(tab.meta, "t"), "log10 eps",
                  "log10 " + std::string(q.name), {}, {}, {}};
      sp.series.push_back({z, y, "", "#1f77b4", 1.0, true});
      const std::string b = std::string(q.name) + ".";
      for (const auto& [k, v] : fits)
        if (k == b + "slope") {
          const double a = parse_number(v), c0 = parse_number(lookup(fits, b + "intercept"));
          const auto [zlo, zhi] = std::minmax_element(z.begin(), z.end());
          sp.series.push_back({{*zlo, *zhi}, {a * *zlo + c0, a * *zhi + c0}, "fit", "#d62728", 1.5, false});
          sp.notes.push_back("slope = " + printf_number("%.4f", a) + " +/- " +
                             printf_number("%.4f", parse_number(lookup(fits, b + "sigma_slope"))));
          sp.notes.push_back("intercept = " + printf_number("%.4f", c0) +
                             ", r = " + printf_number("%.4f", parse_number(lookup(fits, b + "r"))));
        }
      write_svg(dir / ("scaling_" + std::string(q.name) + "_" + tag + ".svg"), sp, written);
    }
  }
  return written;
}

}  // namespace kdvw
