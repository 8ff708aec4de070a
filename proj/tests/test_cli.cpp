#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "kdvw/config.hpp"
#include "kdvw/errors.hpp"
#include "kdvw/output.hpp"
#include "kdvw/pipeline.hpp"
#include "kdvw/svg.hpp"

using namespace kdvw;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kdvw-test-" + name);
  fs::remove_all(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(KDVW_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

int count_kind(const KeyValues& man, const std::string& kind) {
  int n = 0;
  for (const auto& [k, v] : man)
    if (k.size() > 5 && k.ends_with(".kind") && v == kind) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "# sweep\n"
      "epsilon = 10^-1, 10^-1.5 , 0.01\n"
      "times = 0.3, 0.4   # two snapshots\n"
      "nx-whitham = 120\n"
      "precision = true\n"
      "nmodes[10^-1.5] = 8192\n"
      "dt[10^-1.5] = 1e-4\n"
      "out = results\n");
  REQUIRE(c.epsilons.size() == 3);
  CHECK(c.epsilons[0] == doctest::Approx(0.1));
  CHECK(c.epsilons[1] == doctest::Approx(std::pow(10.0, -1.5)));
  CHECK(c.times == std::vector<double>{0.3, 0.4});
  CHECK(c.nx_whitham == 120);
  CHECK(c.precision);
  CHECK(c.out == "results");
  CHECK(final_time(c) == 0.4);
  validate(c);

  const auto k = kdv_params(c, std::pow(10.0, -1.5));
  CHECK(k.n == 8192);
  CHECK(k.L == 5.0);
  CHECK(k.dt == 1e-4);

  CHECK_THROWS_AS(parse_config("epsilon = 0.1\nfoo = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epsilon = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epsilon 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("epsilon = 0.1,\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("precision = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("nx-whitham = 1.5\n"), ConfigError);
}

TEST_CASE("table 1 defaults") {
  ExperimentConfig c;
  const std::pair<double, KdvParams> rows[] = {
      {1.0, {1 << 10, 5.0, 4e-4}},   {1.25, {1 << 12, 5.0, 2e-4}}, {1.5, {1 << 12, 5.0, 2e-4}},
      {1.75, {1 << 14, 5.0, 1e-4}},  {2.0, {1 << 14, 5.0, 5e-5}},  {2.25, {1 << 16, 4.0, 2.5e-5}},
      {2.5, {1 << 16, 4.0, 2.5e-5}}, {2.75, {1 << 17, 4.0, 6.67e-6}}, {3.0, {1 << 17, 4.0, 6.67e-6}},
  };
  for (const auto& [nl, want] : rows) {
    const auto k = kdv_params(c, std::pow(10.0, -nl));
    CHECK(k.n == want.n);
    CHECK(k.L == want.L);
    CHECK(k.dt == want.dt);
  }
  CHECK(table1().size() == 9);
  CHECK(table1_row(0.1)->log_err == -6.32);
  CHECK(table1_row(0.5) == nullptr);

  c.epsilons = {1.0};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.overrides = {2048, 10.0, 4e-4};
  validate(c);
  c.overrides.dt = 1.0 / 2048 + 1e-6;
  CHECK_THROWS_AS(validate(c), ConfigError);

  ExperimentConfig l;
  l.epsilons = {std::pow(10.0, -2.5)};
  CHECK_THROWS_AS(validate(l), ConfigError);
  l.long_runs = true;
  validate(l);

  ExperimentConfig t;
  t.tmax = 0.3;
  CHECK_THROWS_AS(validate(t), ConfigError);
  t.tmax.reset();
  t.per_eps[0.01].n = 4096;
  CHECK_THROWS_AS(validate(t), ConfigError);
  ExperimentConfig pr;
  pr.profile = "gaussian";
  CHECK_THROWS_AS(validate(pr), ConfigError);
}

TEST_CASE("tables round-trip exactly") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(u(rng) * std::pow(10.0, 40 * u(rng)));
    b.push_back(u(rng));
  }
  a.push_back(4.9e-324);
  b.push_back(std::numeric_limits<double>::max());
  a.push_back(std::numeric_limits<double>::quiet_NaN());
  b.push_back(-0.0);
  Table t;
  t.meta = {{"eps", "0.1"}, {"note", "round trip"}};
  t.add("a", a);
  t.add("b", b);
  const auto dir = scratch("table");
  fs::create_directories(dir);
  write_table(dir / "t.dat", t);
  const auto r = read_table(dir / "t.dat");
  CHECK(r.names == t.names);
  CHECK(r.meta == t.meta);
  REQUIRE(r.rows() == a.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i])) same &= std::isnan(r.column("a")[i]);
    else same &= r.column("a")[i] == a[i];
    same &= r.column("b")[i] == b[i];
  }
  CHECK(same);
  CHECK(std::signbit(r.column("b").back()));
  CHECK_THROWS_AS(r.column("c"), IoError);
  CHECK_THROWS_AS(read_table(dir / "missing.dat"), IoError);

  write_key_values(dir / "kv.txt", {{"x", "1"}, {"y", "two words"}});
  const auto kv = read_key_values(dir / "kv.txt");
  CHECK(lookup(kv, "y") == "two words");

  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("svg rendering") {
  PlotSpec empty{"empty", "x", "diff", {}, {}, {}};
  empty.series.push_back({{}, {}, "", "#000", 1.0, false});
  const auto s = render_svg(empty);
  CHECK(s.find("<svg") == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("polyline") == std::string::npos);

  PlotSpec p{"overlay <t = 0.4>", "x", "u", {}, {{-3.2, "x-"}, {-2.1, "x+"}}, {"slope = 1.0 +/- 0.1"}};
  p.series.push_back({{-4, -3, -2, -1}, {0, -0.5, std::nan(""), -0.1}, "KdV", "#1f77b4", 1.0, false});
  const auto o = render_svg(p);
  CHECK(o.find("&lt;t = 0.4&gt;") != std::string::npos);
  CHECK(o.find(">x-</text>") != std::string::npos);
  CHECK(o.find(">x+</text>") != std::string::npos);
  CHECK(o.find("slope = 1.0 +/- 0.1") != std::string::npos);
  CHECK(o.find("nan") == std::string::npos);
}

TEST_CASE("minimal run") {
  ExperimentConfig c;
  c.nx_whitham = 24;
  c.out = scratch("run-a").string();
  const auto rep = run_experiment(c);
  CHECK(rep.exit_code == 0);
  const auto man = read_key_values(fs::path(c.out) / "manifest.txt");
  CHECK(lookup(man, "status") == "complete");
  CHECK(count_kind(man, "snapshot") == 1);
  CHECK(count_kind(man, "zone") == 1);
  CHECK(count_kind(man, "metrics") == 1);
  CHECK(count_kind(man, "fits") == 1);
  CHECK(count_kind(man, "plot") > 0);

  // Every artifact is listed with its checksum.
  for (const auto& a : rep.artifacts) CHECK(sha256_file(fs::path(c.out) / a.path) == a.sha256);

  const auto snap = read_table(fs::path(c.out) / "snapshot_e1_t0.4.dat");
  CHECK(snap.rows() == 1024);
  const auto& x = snap.column("x");
  const double xm = std::stod(snap.meta_value("x_minus")), xp = std::stod(snap.meta_value("x_plus"));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double code = snap.column("region")[i];
    CHECK(code == (x[i] < xm ? -1.0 : x[i] > xp ? 1.0 : 0.0));
    CHECK(std::abs(snap.column("diff")[i] - (snap.column("u_kdv")[i] - snap.column("u_app")[i])) < 1e-15);
  }
  const auto m = read_key_values(fs::path(c.out) / "metrics_e1_t0.4.txt");
  CHECK(std::stod(lookup(m, "x_minus")) == xm);
  CHECK(std::stod(lookup(m, "err_mid")) > 0.0);
  CHECK(lookup(m, "err_mid_window_half_width") != "");

  // Identical configuration, identical bytes.
  ExperimentConfig c2 = c;
  c2.out = scratch("run-b").string();
  const auto rep2 = run_experiment(c2);
  REQUIRE(rep2.artifacts.size() == rep.artifacts.size());
  for (std::size_t i = 0; i < rep.artifacts.size(); ++i) {
    CHECK(rep.artifacts[i].path == rep2.artifacts[i].path);
    CHECK(rep.artifacts[i].sha256 == rep2.artifacts[i].sha256);
  }

  // Plots regenerate from the tables alone.
  for (const auto& f : fs::directory_iterator(c.out))
    if (f.path().extension() == ".svg") fs::remove(f.path());
  const auto plots = plot_directory(c.out);
  CHECK(plots.size() == static_cast<std::size_t>(count_kind(man, "plot")));
}

TEST_CASE("snapshot before breaking") {
  ExperimentConfig c;
  c.times = {0.1, 0.4};
  c.nx_whitham = 24;
  c.out = scratch("run-early").string();
  const auto rep = run_experiment(c);
  CHECK(rep.exit_code == 0);
  const auto snap = read_table(fs::path(c.out) / "snapshot_e1_t0.1.dat");
  CHECK(snap.meta_value("zone") == "none");
  double worst = 0.0;
  for (double d : snap.column("diff")) worst = std::max(worst, std::abs(d));
  CHECK(worst < 0.05);
  const auto u = hopf_before_breaking(Sech2Profile(), std::vector<double>{-1.0}, 0.1);
  // u = u0(x - 6 t u)
  CHECK(std::abs(u[0] + std::pow(std::cosh(-1.0 - 0.6 * u[0]), -2)) < 1e-12);
}

TEST_CASE("command line") {
  const auto out = scratch("cli");
  CHECK(cli("run --epsilon 0.1 --times 0.4 --nx-whitham 24 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "manifest.txt"));
  CHECK(cli("plot --from " + out.string()) == 0);

  CHECK(cli("run --epsilon 1 --out " + scratch("cli-bad").string()) == 2);
  CHECK(cli("run --epsilon 10^-2.5 --out " + scratch("cli-long").string()) == 2);
  CHECK(cli("run --nx-whitham 4") == 2);
  CHECK(cli("run --frobnicate") == 2);
  CHECK(cli("plot") == 2);
  CHECK(cli("plot --from " + scratch("cli-none").string()) == 1);

  const auto cfg = scratch("cli-cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "run.cfg") << "epsilon = 0.1\ntimes = 0.4\nnx-whitham = 24\nout = " << (cfg / "out").string() << "\n";
  CHECK(cli("run --config " + (cfg / "run.cfg").string()) == 0);
  CHECK(fs::exists(cfg / "out" / "manifest.txt"));
  std::ofstream(cfg / "broken.cfg") << "epsilon = 0.1\nwhat\n";
  CHECK(cli("run --config " + (cfg / "broken.cfg").string()) == 2);

  // A snapshot a hair after breaking has no resolvable zone: partial failure, the rest still written.
  const auto part = scratch("cli-partial");
  CHECK(cli("run --epsilon 0.1 --times 0.2165063509461097,0.4 --nx-whitham 24 --out " + part.string()) == 1);
  const auto man = read_key_values(part / "manifest.txt");
  CHECK(lookup(man, "status") == "partial");
  CHECK(count_kind(man, "metrics") == 1);
}
