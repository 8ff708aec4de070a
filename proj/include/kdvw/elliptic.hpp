#pragma once

namespace kdvw {

// Complete elliptic integrals for parameter m = s^2, with the two
// differences that cancel badly near s = 0 computed directly.
struct EllipticPair {
  double K = 0.0;
  double E = 0.0;
  double m = 0.0;          // s^2
  double m1 = 1.0;         // 1 - s^2
  double K_minus_E = 0.0;  // K - E
  double E_minus_m1K = 0.0;  // E - (1 - s^2) K
};

// Modulus s in [0, 1).
EllipticPair elliptic_KE(double s);
// Parameter given together with its complement, so that m1 can carry
// full relative precision when m is close to 1.
EllipticPair elliptic_KE_parameter(double m, double m1);

struct JacobiSnCnDn {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

JacobiSnCnDn jacobi_sncndn(double z, double s);
JacobiSnCnDn jacobi_sncndn_parameter(double z, double m1);

struct ThetaDerivs {
  double value = 1.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// theta_3(z | tau) = 1 + 2 sum q^{n^2} cos(2 pi n z), q = exp(i pi tau),
// for purely imaginary tau = i * tau_imag.
double theta3(double z, double tau_imag, double tol = 1e-17);
ThetaDerivs theta3_derivs(double z, double tau_imag, double tol = 1e-17);

}  // namespace kdvw
