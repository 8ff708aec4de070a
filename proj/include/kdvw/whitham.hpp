#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kdvw/profile.hpp"

namespace kdvw {

// X3 < 0 before beta_3 has crossed the minimum of u0, X3 > 0 after.
enum class Regime { x3_negative, x3_positive };

// Riemann invariants beta_1 > beta_2 > beta_3 of the genus-one Whitham system.
// beta_3 is carried through its label x3 (u0(x3) = beta_3), which stays monotone
// across the hump.
struct WhithamTriple {
  std::array<double, 3> beta{};
  double x3 = 0.0;
  double x = 0.0;
  double t = 0.0;

  double alpha = 0.0;
  double s2 = 0.0;  // (beta_2 - beta_3) / (beta_1 - beta_3)
  double K = 0.0;
  double E = 0.0;

  Regime regime() const { return x3 > 0.0 ? Regime::x3_positive : Regime::x3_negative; }
};

WhithamTriple make_triple(const Profile& p, double b1, double b2, double x3, double x = 0.0,
                          double t = 0.0);
WhithamTriple make_triple(const Profile& p, std::array<double, 3> beta,
                          Regime r = Regime::x3_negative, double x = 0.0, double t = 0.0);

struct PhaseOptions {
  int initial = 16;
  int max = 4096;
  double tol = 1e-14;
};

// q and its gradient; Q = sum_i dq_i.
struct PhaseGradient {
  double q = 0.0;
  std::array<double, 3> dq{};
  double Q = 0.0;
  int nodes = 0;
};

std::array<double, 3> speeds(const WhithamTriple& w);
PhaseGradient phase_gradient(const Profile& p, const WhithamTriple& w, const PhaseOptions& o = {});
double q_phase(const Profile& p, const WhithamTriple& w, const PhaseOptions& o = {});
std::array<double, 3> w_coeffs(const Profile& p, const WhithamTriple& w, const PhaseOptions& o = {});

// (S1, S2, S3): the hodograph system with the first and third equations divided
// by (beta_1 - beta_2) K and beta_2 - beta_3.
std::array<double, 3> hodograph_residual(const Profile& p, const WhithamTriple& w, double x,
                                         double t, const PhaseOptions& o = {});

std::array<double, 3> beta_x_derivatives(const Profile& p, const WhithamTriple& w,
                                         const PhaseOptions& o = {});

enum class EdgeKind { leading, trailing };

struct EdgePoint {
  EdgeKind kind = EdgeKind::leading;
  double t = 0.0;
  double x_edge = 0.0;
  double beta_outer = 0.0;   // beta_1 (leading) or beta_3 (trailing)
  double beta_double = 0.0;  // merged pair
  double x3 = 0.0;           // label of beta_3
  std::array<double, 3> residual{};
  bool converged = false;
};

struct EdgeSeed {
  double beta_outer = 0.0;
  double beta_double = 0.0;
  double x3 = 0.0;  // trailing edge only
};

struct SolveOptions {
  bool precision = true;  // 1e-12 sum of squares, otherwise 1e-6
  int max_iterations = 20000;
};

// Seeds near breaking from the cubic expansion of the edge systems.
EdgeSeed leading_seed(const Profile& p, double t);
EdgeSeed trailing_seed(const Profile& p, double t);

EdgePoint leading_edge(const Profile& p, double t, std::optional<EdgeSeed> seed = std::nullopt,
                       const SolveOptions& o = {});
EdgePoint trailing_edge(const Profile& p, double t, std::optional<EdgeSeed> seed = std::nullopt,
                        const SolveOptions& o = {});

struct HumpCrossing {
  double T = 0.0;
  double x_T = 0.0;
  double beta1_at_T = 0.0;
  std::array<double, 2> residual{};
};

HumpCrossing hump_time(const Profile& p, const SolveOptions& o = {});

struct EdgeAsymptotics {
  double x_minus = 0.0;
  double x_plus = 0.0;
};

EdgeAsymptotics edge_asymptotics(const Profile& p, double t);

// Edge tracks on a time grid, each solve seeded from the previous time.
struct EdgeTrack {
  std::vector<EdgePoint> leading, trailing;
};
EdgeTrack edge_track(const Profile& p, const std::vector<double>& times, const SolveOptions& o = {});
// Geometric spacing in t - t_c from 1e-4 up to 1e-2, linear afterwards.
std::vector<double> edge_track_times(const Profile& p, double t_end, int n_linear = 40);

struct ZonePoint {
  WhithamTriple triple;
  double q = 0.0;
  double sum_sq = 0.0;  // summed squared residual
  int evaluations = 0;
  bool converged = false;
};

struct ZoneSolution {
  double t = 0.0;
  EdgePoint leading, trailing;
  std::vector<ZonePoint> points;  // ascending x, strictly inside the zone
  std::optional<double> x_T;      // beta_3 = min u0 along the grid (t > T)
  int failures = 0;
};

struct ZoneOptions {
  SolveOptions solve;
  double edge_fraction = 0.1;  // width of each clustered edge layer
  std::optional<EdgeSeed> leading_seed, trailing_seed;
};

// Nx points, one third clustered in each edge layer.
std::vector<double> zone_grid(double x_minus, double x_plus, int nx, double edge_fraction = 0.1);

ZoneSolution solve_zone(const Profile& p, double t, int nx, const ZoneOptions& o = {});

}  // namespace kdvw
