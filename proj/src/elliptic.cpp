#include "kdvw/elliptic.hpp"

#include <cmath>
#include <numbers>

#include "kdvw/errors.hpp"

namespace kdvw {

EllipticPair elliptic_KE_parameter(double m, double m1) {
  if (!(m >= 0.0) || !(m1 > 0.0)) throw DomainError("elliptic_KE: parameter outside [0, 1)");
  EllipticPair out;
  out.m = m;
  out.m1 = m1;
  double a = 1.0;
  double b = std::sqrt(m1);
  double c = std::sqrt(m);
  double weight = 1.0;
  double rest = 0.0;  // sum_{n>=1} 2^{n-1} c_n^2
  for (int it = 0; it < 64; ++it) {
    const double a_next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    c = c * c / (4.0 * a_next);
    a = a_next;
    rest += weight * c * c;
    weight *= 2.0;
    if (c <= 1e-18 * a) break;
  }
  out.K = std::numbers::pi / (2.0 * a);
  out.K_minus_E = out.K * (0.5 * m + rest);
  out.E_minus_m1K = out.K * (0.5 * m - rest);
  out.E = out.K - out.K_minus_E;
  return out;
}

EllipticPair elliptic_KE(double s) {
  if (!(std::abs(s) < 1.0)) throw DomainError("elliptic_KE: modulus must satisfy |s| < 1");
  return elliptic_KE_parameter(s * s, (1.0 - s) * (1.0 + s));
}

JacobiSnCnDn jacobi_sncndn_parameter(double z, double m1) {
  if (!(m1 >= 0.0 && m1 <= 1.0)) throw DomainError("jacobi_sncndn: parameter outside [0, 1]");
  JacobiSnCnDn r;
  if (m1 == 0.0) {
    r.cn = 1.0 / std::cosh(z);
    r.dn = r.cn;
    r.sn = std::tanh(z);
    return r;
  }
  constexpr double ca = 1e-9;
  double em[16], en[16];
  double a = 1.0, c = 1.0, emc = m1;
  int l = 0;
  r.dn = 1.0;
  for (int i = 0; i < 16; ++i) {
    l = i;
    em[i] = a;
    emc = std::sqrt(emc);
    en[i] = emc;
    c = 0.5 * (a + emc);
    if (std::abs(a - emc) <= ca * a) break;
    emc *= a;
    a = c;
  }
  const double u = z * c;
  r.sn = std::sin(u);
  r.cn = std::cos(u);
  if (r.sn != 0.0) {
    a = r.cn / r.sn;
    c *= a;
    for (int ii = l; ii >= 0; --ii) {
      const double b = em[ii];
      a *= c;
      c *= r.dn;
      r.dn = (en[ii] + a) / (b + a);
      a = c / b;
    }
    a = 1.0 / std::sqrt(c * c + 1.0);
    r.sn = (r.sn >= 0.0) ? a : -a;
    r.cn = c * r.sn;
  }
  return r;
}

JacobiSnCnDn jacobi_sncndn(double z, double s) {
  if (!(std::abs(s) <= 1.0)) throw DomainError("jacobi_sncndn: modulus must satisfy |s| <= 1");
  return jacobi_sncndn_parameter(z, (1.0 - s) * (1.0 + s));
}

ThetaDerivs theta3_derivs(double z, double tau_imag, double tol) {
  if (!(tau_imag > 0.0)) throw DomainError("theta3: Im(tau) must be positive");
  constexpr double pi = std::numbers::pi;
  ThetaDerivs r;
  constexpr int max_terms = 100000;
  for (int n = 1;; ++n) {
    if (n > max_terms) throw ConvergenceError("theta3: series converges too slowly");
    const double nn = static_cast<double>(n);
    const double qn = std::exp(-pi * tau_imag * nn * nn);
    const double arg = 2.0 * pi * nn * z;
    const double cs = std::cos(arg), sn = std::sin(arg);
    r.value += 2.0 * qn * cs;
    r.d1 -= 4.0 * pi * nn * qn * sn;
    r.d2 -= 8.0 * pi * pi * nn * nn * qn * cs;
    if (qn * 8.0 * pi * pi * nn * nn < tol) break;
  }
  return r;
}

double theta3(double z, double tau_imag, double tol) {
  if (!(tau_imag > 0.0)) throw DomainError("theta3: Im(tau) must be positive");
  constexpr double pi = std::numbers::pi;
  double value = 1.0;
  for (int n = 1;; ++n) {
    if (n > 100000) throw ConvergenceError("theta3: series converges too slowly");
    const double nn = static_cast<double>(n);
    const double qn = std::exp(-pi * tau_imag * nn * nn);
    value += 2.0 * qn * std::cos(2.0 * pi * nn * z);
    if (qn < tol) break;
  }
  return value;
}

}  // namespace kdvw
