#include "kdvw/kdv.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "kdvw/errors.hpp"

namespace kdvw {

namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  std::memset(static_cast<void*>(p), 0, sizeof(T) * n);
  return FftwBuffer<T>(p);
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

std::vector<double> kdv_grid(int n, double L) {
  std::vector<double> x(n);
  const double h = 2.0 * std::numbers::pi * L / n;
  for (int j = 0; j < n; ++j) x[j] = -std::numbers::pi * L + j * h;
  return x;
}

struct KdvSolver::Impl {
  int n, nh, cut;
  double L, eps;
  std::vector<double> k;  // wavenumbers j / L
  FftwBuffer<double> r;
  FftwBuffer<cplx> c, v, a, b, cc, d, tmp;
  fftw_plan fwd = nullptr, inv = nullptr;

  double cached_dt = -1.0;
  std::vector<cplx> E, E2, g;

  Impl(int n_, double L_, double eps_) : n(n_), nh(n_ / 2 + 1), cut(n_ / 3), L(L_), eps(eps_), k(nh) {
    for (int j = 0; j < nh; ++j) k[j] = j / L;
    r = fftw_buffer<double>(n);
    c = fftw_buffer<cplx>(nh);
    v = fftw_buffer<cplx>(nh);
    a = fftw_buffer<cplx>(nh);
    b = fftw_buffer<cplx>(nh);
    cc = fftw_buffer<cplx>(nh);
    d = fftw_buffer<cplx>(nh);
    tmp = fftw_buffer<cplx>(nh);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(n, r.get(), as_fftw(c.get()), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, as_fftw(c.get()), r.get(), FFTW_ESTIMATE);
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }

  void prepare(double dt) {
    if (dt == cached_dt) return;
    cached_dt = dt;
    E.assign(nh, 0.0);
    E2.assign(nh, 0.0);
    g.assign(nh, 0.0);
    for (int j = 0; j < nh; ++j) {
      const double w = eps * eps * k[j] * k[j] * k[j];
      E[j] = std::polar(1.0, 0.5 * w * dt);
      E2[j] = E[j] * E[j];
      g[j] = (j <= cut) ? cplx(0.0, -3.0 * k[j] * dt / n) : cplx(0.0);
    }
  }

  // Physical samples of the coefficients in `in` (left in r).
  void to_physical(const cplx* in) {
    std::copy(in, in + nh, c.get());
    fftw_execute_dft_c2r(inv, as_fftw(c.get()), r.get());
  }

  // out = g * FFT[(IFFT in)^2]; if `u_sq` is set, r already holds IFFT(in).
  void nonlinear(const cplx* in, cplx* out, bool have_physical = false) {
    if (!have_physical) to_physical(in);
    double* u = r.get();
    for (int j = 0; j < n; ++j) u[j] *= u[j];
    fftw_execute_dft_r2c(fwd, u, as_fftw(out));
    for (int j = 0; j < nh; ++j) out[j] *= g[j];
  }

  // Energy of the coefficients in `in`, with r holding IFFT(in) on entry.
  double energy_from_physical(const cplx* in) {
    std::vector<double> u(r.get(), r.get() + n);
    for (int j = 0; j < nh; ++j) c[j] = cplx(0.0, k[j]) * in[j];
    if (n % 2 == 0) c[nh - 1] = 0.0;
    fftw_execute_dft_c2r(inv, as_fftw(c.get()), r.get());
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += 2.0 * u[j] * u[j] * u[j] - eps * eps * r[j] * r[j];
    std::copy(u.begin(), u.end(), r.get());
    return sum * (2.0 * std::numbers::pi * L / n);
  }

  // One RK4 step on the integrating-factor variable; returns the energy of
  // the state before the step when requested.
  double advance(double dt, bool want_energy) {
    prepare(dt);
    cplx* V = v.get();
    to_physical(V);
    const double energy = want_energy ? energy_from_physical(V) : 0.0;
    nonlinear(V, a.get(), true);
    for (int j = 0; j < nh; ++j) tmp[j] = E[j] * (V[j] + 0.5 * a[j]);
    nonlinear(tmp.get(), b.get());
    for (int j = 0; j < nh; ++j) tmp[j] = E[j] * V[j] + 0.5 * b[j];
    nonlinear(tmp.get(), cc.get());
    for (int j = 0; j < nh; ++j) tmp[j] = E2[j] * V[j] + E[j] * cc[j];
    nonlinear(tmp.get(), d.get());
    double check = 0.0;
    for (int j = 0; j < nh; ++j) {
      V[j] = E2[j] * V[j] + (E2[j] * a[j] + 2.0 * E[j] * (b[j] + cc[j]) + d[j]) / 6.0;
      if (j > cut) V[j] = 0.0;
      check += std::abs(V[j]);
    }
    if (!std::isfinite(check)) throw BlowUpError("kdv: non-finite modes after time step");
    return energy;
  }

  void load(const SpectralField& f) {
    if (f.n != n || static_cast<int>(f.modes.size()) != nh)
      throw DomainError("kdv: field does not match solver size");
    std::copy(f.modes.begin(), f.modes.end(), v.get());
  }
  void store(SpectralField& f) const { std::copy(v.get(), v.get() + nh, f.modes.begin()); }
};

KdvSolver::KdvSolver(int n, double L, double epsilon) : n_(n), L_(L), eps_(epsilon) {
  if (n < 16 || n % 2 != 0) throw DomainError("kdv: need an even number of modes, at least 16");
  if (!(L > 0.0) || !(epsilon > 0.0)) throw DomainError("kdv: L and epsilon must be positive");
  impl_ = std::make_unique<Impl>(n, L, epsilon);
}

KdvSolver::~KdvSolver() = default;

SpectralField KdvSolver::from_physical(const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != n_) throw DomainError("kdv: sample count does not match solver size");
  SpectralField f;
  f.n = n_;
  f.L = L_;
  f.epsilon = eps_;
  f.modes.resize(impl_->nh);
  std::copy(u.begin(), u.end(), impl_->r.get());
  fftw_execute_dft_r2c(impl_->fwd, impl_->r.get(), as_fftw(impl_->c.get()));
  for (int j = 0; j < impl_->nh; ++j) f.modes[j] = impl_->c[j] / static_cast<double>(n_);
  return f;
}

SpectralField KdvSolver::init(const std::function<double(double)>& u0, bool strict,
                              std::string* warning) {
  const auto x = grid();
  std::vector<double> u(n_);
  for (int j = 0; j < n_; ++j) u[j] = u0(x[j]);
  SpectralField f = from_physical(u);
  double tail = 0.0;
  for (int j = cutoff() + 1; j < impl_->nh; ++j) tail = std::max(tail, std::abs(f.modes[j]));
  if (tail > 1e-12) {
    const std::string msg = "initial data spectral tail " + std::to_string(tail) + " exceeds 1e-12";
    if (strict) throw ResolutionError("kdv: " + msg);
    if (warning) *warning = msg;
  }
  for (int j = cutoff() + 1; j < impl_->nh; ++j) f.modes[j] = 0.0;
  return f;
}

void KdvSolver::step(SpectralField& f, double dt) {
  if (!(dt > 0.0)) throw DomainError("kdv: time step must be positive");
  impl_->load(f);
  impl_->advance(dt, false);
  impl_->store(f);
  f.t += dt;
}

EvolveResult KdvSolver::evolve(SpectralField f, double t_target, double dt,
                               const std::vector<double>& snapshot_times) {
  if (!(dt > 0.0)) throw DomainError("kdv: time step must be positive");
  const double span = t_target - f.t;
  if (span < 0.0) throw DomainError("kdv: target time lies in the past");
  const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
  const double h = span / steps;

  std::vector<std::pair<long, double>> marks;
  for (double ts : snapshot_times) {
    const long s = std::lround((ts - f.t) / h);
    if (s < 0 || s > steps) throw DomainError("kdv: snapshot time outside the run");
    marks.emplace_back(s, ts);
  }
  std::sort(marks.begin(), marks.end());

  EvolveResult res;
  res.steps = steps;
  impl_->load(f);
  const double t0 = f.t;
  std::size_t next = 0;
  auto take_snapshots = [&](long s, double t) {
    while (next < marks.size() && marks[next].first == s) {
      Snapshot snap;
      snap.t = t;
      impl_->to_physical(impl_->v.get());
      snap.u.assign(impl_->r.get(), impl_->r.get() + n_);
      res.snapshots.push_back(std::move(snap));
      ++next;
    }
  };
  take_snapshots(0, t0);
  for (long s = 0; s < steps; ++s) {
    const double e = impl_->advance(h, true);
    res.energy.times.push_back(t0 + s * h);
    res.energy.E.push_back(e);
    take_snapshots(s + 1, t0 + (s + 1) * h);
  }
  impl_->store(f);
  f.t = t0 + steps * h;
  res.energy.times.push_back(f.t);
  res.energy.E.push_back(energy(f));
  const double e0 = res.energy.E.front();
  for (double e : res.energy.E) res.energy.err.push_back(e0 == 0.0 ? 0.0 : 1.0 - e / e0);
  res.energy.err.front() = 0.0;
  res.field = std::move(f);
  return res;
}

double KdvSolver::energy(const SpectralField& f) {
  impl_->load(f);
  impl_->to_physical(impl_->v.get());
  return impl_->energy_from_physical(impl_->v.get());
}

std::vector<double> KdvSolver::physical(const SpectralField& f) {
  impl_->load(f);
  impl_->to_physical(impl_->v.get());
  return std::vector<double>(impl_->r.get(), impl_->r.get() + n_);
}

}  // namespace kdvw
