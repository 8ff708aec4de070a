#include "kdvw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kdvw/errors.hpp"
#include "kdvw/profile.hpp"

namespace kdvw {

namespace {

constexpr Table1Row kTable1[] = {
    {1.0, 10, 5.0, 4e-4, -6.32},    {1.25, 12, 5.0, 2e-4, -7.79},  {1.5, 12, 5.0, 2e-4, -6.33},
    {1.75, 14, 5.0, 1e-4, -6.30},   {2.0, 14, 5.0, 5e-5, -6.29},   {2.25, 16, 4.0, 2.5e-5, -6.30},
    {2.5, 16, 4.0, 2.5e-5, -4.79},  {2.75, 17, 4.0, 6.67e-6, -6.16}, {3.0, 17, 4.0, 6.67e-6, -4.68},
};

bool same_eps(double a, double b) { return std::abs(std::log10(a) - std::log10(b)) < 1e-9; }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double plain_number(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("not a boolean: '" + std::string(s) + "'");
}

int parse_int(std::string_view s) {
  const double v = parse_number(s);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("not an integer: '" + std::string(s) + "'");
  return static_cast<int>(v);
}

KdvOverride& override_for(ExperimentConfig& c, double eps) {
  for (auto& [e, o] : c.per_eps)
    if (same_eps(e, eps)) return o;
  return c.per_eps[eps];
}

}  // namespace

std::span<const Table1Row> table1() { return kTable1; }

const Table1Row* table1_row(double eps) {
  if (!(eps > 0.0)) return nullptr;
  for (const auto& r : kTable1)
    if (std::abs(-std::log10(eps) - r.neg_log_eps) < 1e-9) return &r;
  return nullptr;
}

double parse_number(std::string_view s) {
  s = trim(s);
  if (s.starts_with("10^")) return std::pow(10.0, plain_number(s.substr(3)));
  return plain_number(s);
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (item.empty()) throw ConfigError("empty list item");
    out.push_back(parse_number(item));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

void set_key(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key.starts_with("--")) key.remove_prefix(2);
  std::string k(key);
  std::replace(k.begin(), k.end(), '_', '-');

  const auto open = k.find('[');
  if (open != std::string::npos) {
    if (k.back() != ']') throw ConfigError("malformed key '" + k + "'");
    const double eps = parse_number(std::string_view(k).substr(open + 1, k.size() - open - 2));
    auto& o = override_for(c, eps);
    const auto base = k.substr(0, open);
    if (base == "nmodes") o.n = parse_int(value);
    else if (base == "L") o.L = parse_number(value);
    else if (base == "dt") o.dt = parse_number(value);
    else throw ConfigError("no per-epsilon form for key '" + base + "'");
    return;
  }
  if (k == "profile") c.profile = std::string(value);
  else if (k == "epsilon") c.epsilons = parse_list(value);
  else if (k == "times") c.times = parse_list(value);
  else if (k == "tmax") c.tmax = parse_number(value);
  else if (k == "nmodes") c.overrides.n = parse_int(value);
  else if (k == "L") c.overrides.L = parse_number(value);
  else if (k == "dt") c.overrides.dt = parse_number(value);
  else if (k == "nx-whitham") c.nx_whitham = parse_int(value);
  else if (k == "precision") c.precision = parse_bool(value);
  else if (k == "long") c.long_runs = parse_bool(value);
  else if (k == "workers") c.workers = parse_int(value);
  else if (k == "out") c.out = std::string(value);
  else throw ConfigError("unknown key '" + k + "'");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      set_key(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

double final_time(const ExperimentConfig& c) {
  const double tm = c.times.empty() ? 0.0 : *std::max_element(c.times.begin(), c.times.end());
  return c.tmax.value_or(tm);
}

KdvParams kdv_params(const ExperimentConfig& c, double eps) {
  KdvOverride o = c.overrides;
  for (const auto& [e, v] : c.per_eps)
    if (same_eps(e, eps)) {
      if (v.n) o.n = v.n;
      if (v.L) o.L = v.L;
      if (v.dt) o.dt = v.dt;
    }
  const Table1Row* row = table1_row(eps);
  if (!row && !(o.n && o.L && o.dt)) {
    std::ostringstream m;
    m << "epsilon " << eps << " has no Table 1 row; set nmodes, L and dt";
    throw ConfigError(m.str());
  }
  KdvParams p;
  p.n = o.n.value_or(row ? 1 << row->log2n : 0);
  p.L = o.L.value_or(row ? row->L : 0.0);
  p.dt = o.dt.value_or(row ? row->dt : 0.0);
  if (p.n < 8 || p.n % 2) throw ConfigError("nmodes must be even and at least 8");
  if (!(p.L > 0.0)) throw ConfigError("L must be positive");
  if (!(p.dt > 0.0)) throw ConfigError("dt must be positive");
  const bool overridden = o.n || o.dt;
  if (overridden && p.dt > 1.0 / p.n) {
    std::ostringstream m;
    m << "dt = " << p.dt << " exceeds 1/N = " << 1.0 / p.n << " for epsilon " << eps;
    throw ConfigError(m.str());
  }
  return p;
}

void validate(const ExperimentConfig& c) {
  if (c.epsilons.empty()) throw ConfigError("no epsilon given");
  if (c.times.empty()) throw ConfigError("no snapshot time given");
  for (double e : c.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilon must be positive");
  for (double t : c.times)
    if (!(t > 0.0)) throw ConfigError("snapshot times must be positive");
  if (c.tmax && *c.tmax < *std::max_element(c.times.begin(), c.times.end()))
    throw ConfigError("tmax lies before the last snapshot time");
  if (c.nx_whitham < 12) throw ConfigError("nx-whitham must be at least 12");
  if (c.workers < 0) throw ConfigError("workers must be non-negative");
  if (c.out.empty()) throw ConfigError("empty output directory");
  for (const auto& [e, o] : c.per_eps) {
    const bool listed = std::any_of(c.epsilons.begin(), c.epsilons.end(), [&](double v) { return same_eps(v, e); });
    if (!listed) throw ConfigError("override for an epsilon that is not run");
  }
  for (double e : c.epsilons) {
    if (-std::log10(e) > 2.5 - 1e-9 && !c.long_runs)
      throw ConfigError("epsilon <= 10^-2.5 needs --long");
    kdv_params(c, e);
  }
  try {
    make_profile(c.profile);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
}

}  // namespace kdvw
