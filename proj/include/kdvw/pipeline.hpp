#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdvw/compare.hpp"
#include "kdvw/config.hpp"
#include "kdvw/kdv.hpp"
#include "kdvw/output.hpp"

namespace kdvw {

// One KdV run to tmax with snapshots at the requested times.
struct KdvRun {
  double eps = 0.0;
  KdvParams params;
  std::vector<double> x;
  std::vector<Snapshot> snapshots;
  EnergyTrace energy;
};

KdvRun run_kdv(const Profile& p, double eps, const KdvParams& k, std::span<const double> times,
               double tmax);
// 1 - E(t)/E(0) at the recorded step nearest to t.
double energy_error_at(const EnergyTrace& e, double t);

// Single-valued Hopf solution before breaking.
std::vector<double> hopf_before_breaking(const Profile& p, std::span<const double> x, double t);

struct Comparison {
  DiffField diff;
  std::vector<double> u_app;
  std::vector<double> env_lower, env_upper;  // nan outside the zone
  Metrics metrics;
};

Comparison compare_snapshot(const Composite& c, std::span<const double> x, std::span<const double> u_kdv,
                            double eps);

// Metric fields recorded per run and fitted across epsilon.
struct ScalingQuantity {
  const char* name;
  double Metrics::*field;
};
std::span<const ScalingQuantity> scaling_quantities();

struct Artifact {
  std::string path;  // relative to the output directory
  std::string kind;
  std::optional<double> eps, t;
  std::string sha256;
};

struct SubRun {
  std::string stage;
  std::optional<double> eps, t;
  bool ok = true;
  std::string message;
};

struct RunReport {
  std::vector<Artifact> artifacts;
  std::vector<SubRun> runs;
  int exit_code = 0;  // 0 success, 1 partial failure
};

// Runs the whole experiment into c.out and writes manifest.txt last.
RunReport run_experiment(const ExperimentConfig& c);

// Renders SVGs from the tables in dir; returns the files written.
std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir);

std::string eps_tag(double eps);
std::string time_tag(double t);

}  // namespace kdvw
