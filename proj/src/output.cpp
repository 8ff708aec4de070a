#include "kdvw/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "kdvw/errors.hpp"

namespace kdvw {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

namespace {

double read_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::pair<std::string, std::string> split_key_value(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) throw IoError("expected key = value: '" + line + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

}  // namespace

void Table::add(std::string name, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) throw IoError("column '" + name + "' has the wrong length");
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

bool Table::has(std::string_view name) const {
  for (const auto& n : names)
    if (n == name) return true;
  return false;
}

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw IoError("no column '" + std::string(name) + "'");
}

std::string Table::meta_value(std::string_view key) const { return lookup(meta, key); }

void write_table(const std::filesystem::path& path, const Table& t) {
  auto out = open_out(path);
  for (const auto& [k, v] : t.meta) out << "# " << k << " = " << v << '\n';
  for (std::size_t j = 0; j < t.names.size(); ++j) out << (j ? " " : "") << t.names[j];
  out << '\n';
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? " " : "") << format_number(t.columns[j][i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Table read_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  Table t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.meta.push_back(split_key_value(line.substr(1)));
      continue;
    }
    std::istringstream ss(line);
    std::string tok;
    if (!header) {
      while (ss >> tok) t.names.push_back(tok);
      t.columns.resize(t.names.size());
      header = true;
      continue;
    }
    std::size_t j = 0;
    for (; ss >> tok; ++j) {
      if (j >= t.columns.size()) throw IoError("row too long in " + path.string());
      t.columns[j].push_back(read_number(tok));
    }
    if (j != t.columns.size()) throw IoError("row too short in " + path.string());
  }
  if (!header) throw IoError("no header in " + path.string());
  return t;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

KeyValues read_key_values(const std::filesystem::path& path) {
  auto in = open_in(path);
  KeyValues kv;
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) kv.push_back(split_key_value(line));
  return kv;
}

std::string lookup(const KeyValues& kv, std::string_view key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  throw IoError("missing key '" + std::string(key) + "'");
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw IoError("sha256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

}  // namespace kdvw
