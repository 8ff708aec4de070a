#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "kdvw/errors.hpp"
#include "kdvw/profile.hpp"

using namespace kdvw;

namespace {

// Same hump, but every kernel quantity goes through the generic quadrature path.
FunctionProfile generic_sech2() {
  return FunctionProfile(
      "sech2-generic", [](double x) { return -1.0 / std::pow(std::cosh(x), 2); },
      [](double x) { return 2.0 * std::tanh(x) / std::pow(std::cosh(x), 2); }, 0.0);
}

// Phi through its mu-form integral, regime with both arguments on the decreasing branch.
double phi_mu_form(const Profile& p, double xi, double eta) {
  boost::math::quadrature::tanh_sinh<double> ts;
  // Two-argument form: mc is the signed distance to the nearer endpoint.
  auto g = [&](double mu, double mc) {
    const double one_minus = (mu > 0) ? mc : 1 - mu;
    const double y = 0.5 * xi * (1 + mu) + 0.5 * eta * one_minus;
    return p.inverse_derivative(y, Branch::decreasing) / std::sqrt(one_minus);
  };
  return ts.integrate(g, -1.0, 1.0, 1e-14) / (2.0 * std::sqrt(2.0));
}

}  // namespace

TEST_CASE("sech2 breaking constants") {
  const Sech2Profile p;
  const auto exact = *p.exact_critical_point();
  CHECK(exact.t == doctest::Approx(0.21650635094610966).epsilon(1e-15));
  CHECK(exact.x == doctest::Approx(-1.5245043522468470).epsilon(1e-15));
  CHECK(exact.u == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
  const auto num = critical_point(p);
  CHECK(std::abs(num.t - exact.t) < 1e-6);
  CHECK(std::abs(num.x - exact.x) < 1e-6);
  CHECK(std::abs(num.u - exact.u) < 1e-6);
}

TEST_CASE("inverse branches") {
  const Sech2Profile p;
  CHECK(p.inverse(-2.0 / 3.0, Branch::decreasing) == doctest::Approx(-0.65847894846240835).epsilon(1e-14));
  CHECK(p.inverse(-2.0 / 3.0, Branch::increasing) == doctest::Approx(0.65847894846240835).epsilon(1e-14));
  CHECK(p.inverse(-1.0, Branch::decreasing) == 0.0);
  for (double y : {-0.999, -0.7, -0.2, -1e-6}) {
    CHECK(p.value(p.inverse(y, Branch::decreasing)) == doctest::Approx(y).epsilon(1e-13));
    CHECK(p.value(p.inverse(y, Branch::increasing)) == doctest::Approx(y).epsilon(1e-13));
  }
  const FunctionProfile g = generic_sech2();
  for (double y : {-0.95, -0.5, -0.01}) {
    CHECK(g.inverse(y, Branch::decreasing) == doctest::Approx(p.inverse(y, Branch::decreasing)).epsilon(1e-12));
    CHECK(g.inverse_derivative(y, Branch::increasing) ==
          doctest::Approx(p.inverse_derivative(y, Branch::increasing)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(p.inverse(-1.5, Branch::decreasing), DomainError);
  CHECK_THROWS_AS(p.inverse(0.1, Branch::decreasing), DomainError);
  CHECK_THROWS_AS(g.inverse(0.0, Branch::increasing), DomainError);
}

TEST_CASE("accurate difference") {
  const Sech2Profile p;
  const double x = -0.7, dx = 1e-9;
  const double expected = p.derivative(x) * dx;
  CHECK(p.difference(x, dx) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("phi against independent quadrature") {
  const Sech2Profile p;
  const FunctionProfile g = generic_sech2();
  struct Case {
    double xi, eta;
    Branch b;
    double ref;
  };
  const Case cases[] = {
      {-0.5, -0.8, Branch::decreasing, -1.351926225324537299},
      {-0.8, -0.5, Branch::decreasing, -1.3441145250811018559},
      {-0.3, -0.9, Branch::increasing, -2.110459541892389779},
      {-0.6, -0.2, Branch::decreasing, -1.5763333536839134942},
      {-0.05, -0.5, Branch::increasing, -6.0075789692169166066},
  };
  for (const auto& c : cases) {
    CHECK(phi_kernel(p, c.xi, c.eta, c.b) == doctest::Approx(c.ref).epsilon(1e-12));
    CHECK(phi_kernel(g, c.xi, c.eta, c.b) == doctest::Approx(c.ref).epsilon(1e-10));
    if (c.b == Branch::decreasing) CHECK(phi_mu_form(p, c.xi, c.eta) == doctest::Approx(c.ref).epsilon(1e-9));
  }
  CHECK(phi_kernel(p, -0.4, -0.4) == doctest::Approx(p.inverse_derivative(-0.4, Branch::decreasing)));
  CHECK(phi_kernel(p, -0.4, -0.4 + 1e-12) == doctest::Approx(phi_kernel(p, -0.4, -0.4)).epsilon(1e-9));
  CHECK_THROWS_AS(phi_kernel(p, -0.9, -0.5, Branch::increasing), DomainError);
}

TEST_CASE("path integrals, closed form and quadrature") {
  const Sech2Profile p;
  const FunctionProfile g = generic_sech2();
  struct Case {
    double level, x3, A, B;
  };
  const Case cases[] = {
      {-0.4, -0.3, -2.0863453340096022752, -0.35069292593950347174},
      {-0.4, 0.7, -3.5397750919568431021, -1.0499284386654813322},
      {-0.9, 0.2, -2.3393654330411809443, -0.13941769632438830323},
      {-0.1, -1.0, -3.6944294094124946713, -0.26939242400991792653},
  };
  for (const auto& c : cases) {
    const double delta = c.level - p.value(c.x3);
    const auto a = p.path_integrals(c.level, delta, c.x3);
    const auto b = g.path_integrals(c.level, delta, c.x3);
    CHECK(a.A == doctest::Approx(c.A).epsilon(1e-12));
    CHECK(a.B == doctest::Approx(c.B).epsilon(1e-12));
    CHECK(b.A == doctest::Approx(c.A).epsilon(1e-11));
    CHECK(b.B == doctest::Approx(c.B).epsilon(1e-11));
  }
}

TEST_CASE("second derivatives at coincidence") {
  const Sech2Profile p;
  const double uc = -2.0 / 3.0;
  const double f3 = -81.0 * std::sqrt(3.0) / 16.0;
  CHECK(inverse_third_derivative(p, uc, Branch::decreasing) == doctest::Approx(f3).epsilon(1e-8));
  const double h = 1e-3;
  auto phi = [&](double a, double b) { return phi_kernel(p, a, b); };
  const double dxx = (phi(uc + h, uc) - 2 * phi(uc, uc) + phi(uc - h, uc)) / (h * h);
  const double dyy = (phi(uc, uc + h) - 2 * phi(uc, uc) + phi(uc, uc - h)) / (h * h);
  const double dxy = (phi(uc + h, uc + h) - phi(uc + h, uc - h) - phi(uc - h, uc + h) + phi(uc - h, uc - h)) /
                     (4 * h * h);
  CHECK(dxx == doctest::Approx(8.0 / 15.0 * f3).epsilon(1e-5));
  CHECK(dxy == doctest::Approx(2.0 / 15.0 * f3).epsilon(1e-5));
  CHECK(dyy == doctest::Approx(1.0 / 5.0 * f3).epsilon(1e-5));
}

TEST_CASE("rescaled hump scales the breaking time") {
  const double lam = 2.5;
  const FunctionProfile g(
      "wide", [=](double x) { return -1.0 / std::pow(std::cosh(x / lam), 2); },
      [=](double x) { return 2.0 * std::tanh(x / lam) / std::pow(std::cosh(x / lam), 2) / lam; });
  const auto c = critical_point(g);
  const auto ref = *Sech2Profile().exact_critical_point();
  CHECK(std::abs(g.minimum_location()) < 1e-9);
  CHECK(c.t == doctest::Approx(lam * ref.t).epsilon(1e-9));
  CHECK(c.u == doctest::Approx(ref.u).epsilon(1e-7));
  CHECK(c.x == doctest::Approx(lam * ref.x).epsilon(1e-7));
}

TEST_CASE("tabulated profile") {
  std::vector<double> x, u;
  for (int i = 0; i <= 4000; ++i) {
    x.push_back(-20.0 + 0.01 * i);
    u.push_back(-1.0 / std::pow(std::cosh(x.back()), 2));
  }
  const TabulatedProfile t(x, u);
  CHECK(std::abs(t.minimum_location()) < 1e-6);
  CHECK(t.value(0.123) == doctest::Approx(-1.0 / std::pow(std::cosh(0.123), 2)).epsilon(1e-8));
  const auto c = critical_point(t);
  const auto ref = *Sech2Profile().exact_critical_point();
  CHECK(std::abs(c.t - ref.t) < 1e-6);
  CHECK(std::abs(c.x - ref.x) < 1e-6);

  const std::string path = (std::filesystem::temp_directory_path() / "kdvw_profile_table_test.txt").string();
  {
    std::ofstream out(path);
    out << "# x u\n";
    for (std::size_t i = 0; i < x.size(); i += 10) out << x[i] << ' ' << u[i] << '\n';
  }
  const auto loaded = make_profile("table:" + path);
  CHECK(loaded->value(-1.0) == doctest::Approx(-1.0 / std::pow(std::cosh(1.0), 2)).epsilon(1e-4));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(make_profile("gaussian"), ConfigError);
  CHECK_THROWS_AS(TabulatedProfile({0.0, 1.0}, {0.0, 1.0}), DomainError);
}
