#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdvw {

struct Table1Row {
  double neg_log_eps;
  int log2n;
  double L;
  double dt;
  double log_err;  // published log10 of the energy drift at t = 0.4
};

std::span<const Table1Row> table1();
const Table1Row* table1_row(double eps);

struct KdvParams {
  int n = 0;
  double L = 0.0;
  double dt = 0.0;
};

struct KdvOverride {
  std::optional<int> n;
  std::optional<double> L, dt;
};

struct ExperimentConfig {
  std::string profile = "sech2";
  std::vector<double> epsilons{0.1};
  std::vector<double> times{0.4};
  std::optional<double> tmax;
  KdvOverride overrides;
  std::map<double, KdvOverride> per_eps;
  int nx_whitham = 300;
  bool precision = false;
  bool long_runs = false;
  int workers = 0;  // 0: one per hardware thread
  std::string out = "kdvw-out";
};

// Numbers accept the 10^p shorthand, lists are comma separated.
double parse_number(std::string_view s);
std::vector<double> parse_list(std::string_view s);

// key = value, '#' comments; keys as the command-line flags without dashes.
// Per-epsilon overrides use key[eps], e.g. nmodes[10^-2] = 16384.
void set_key(ExperimentConfig& c, std::string_view key, std::string_view value);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Throws ConfigError.
void validate(const ExperimentConfig& c);
double final_time(const ExperimentConfig& c);
// Table 1 unless overridden; overridden steps must satisfy dt <= 1/N.
KdvParams kdv_params(const ExperimentConfig& c, double eps);

}  // namespace kdvw
