#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace kdvw {

// Periodic field on x in [-pi L, pi L).  Only the non-negative wavenumbers
// are stored (n/2 + 1 coefficients); the negative ones are their conjugates,
// so the physical field is real by construction.  Coefficients are
// normalised so that u(x_j) = sum_k modes_k exp(i k (x_j + pi L) / L).
struct SpectralField {
  int n = 0;
  double L = 1.0;
  double epsilon = 1.0;
  double t = 0.0;
  std::vector<std::complex<double>> modes;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E;
  std::vector<double> err;  // 1 - E(t) / E(0)
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
};

struct EvolveResult {
  SpectralField field;
  std::vector<Snapshot> snapshots;
  EnergyTrace energy;
  long steps = 0;
};

std::vector<double> kdv_grid(int n, double L);

// Solver for u_t + 6 u u_x + eps^2 u_xxx = 0: integrating factor on the
// dispersive term, classical RK4 on the rest, 2/3-rule dealiasing.
class KdvSolver {
 public:
  KdvSolver(int n, double L, double epsilon);
  ~KdvSolver();
  KdvSolver(const KdvSolver&) = delete;
  KdvSolver& operator=(const KdvSolver&) = delete;

  int size() const { return n_; }
  double half_period() const { return L_; }
  double epsilon() const { return eps_; }
  std::vector<double> grid() const { return kdv_grid(n_, L_); }
  // Highest retained mode index; everything above it is kept at zero.
  int cutoff() const { return n_ / 3; }

  // Samples u0 on the grid.  A spectral tail above 1e-12 is reported through
  // `warning`, or thrown as ResolutionError when strict.
  SpectralField init(const std::function<double(double)>& u0, bool strict = false,
                     std::string* warning = nullptr);
  SpectralField from_physical(const std::vector<double>& u);

  void step(SpectralField& f, double dt);
  EvolveResult evolve(SpectralField f, double t_target, double dt,
                      const std::vector<double>& snapshot_times = {});

  // int (2 u^3 - eps^2 u_x^2) dx over one period.
  double energy(const SpectralField& f);
  std::vector<double> physical(const SpectralField& f);

 private:
  struct Impl;
  int n_;
  double L_, eps_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kdvw
