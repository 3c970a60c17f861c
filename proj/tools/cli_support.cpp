#include "cli_support.hpp"

#include <openssl/evp.h>

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace mtcp::cli {

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

json load_config(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto j = parse_config_text(ss.str());
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

const json& field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw ConfigError("config field '" + where + "': expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("config field '" + join(where, key) + "' is required");
  return *it;
}

double number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw ConfigError("config field '" + join(where, key) + "': expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("config field '" + join(where, key) + "': must be finite");
  return d;
}

int integer(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_integer()) throw ConfigError("config field '" + join(where, key) + "': expected an integer");
  return v.get<int>();
}

std::size_t count(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError("config field '" + join(where, key) + "': expected a non-negative integer");
  return v.get<std::size_t>();
}

std::uint64_t seed_of(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError("config field '" + join(where, key) + "': expected an unsigned 64-bit integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw ConfigError("config field '" + join(where, key) + "': expected a string");
  return v.get<std::string>();
}

bool flag(const json& j, const std::string& key, const std::string& where, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) throw ConfigError("config field '" + join(where, key) + "': expected true or false");
  return it->get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_array()) throw ConfigError("config field '" + join(where, key) + "': expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError("config field '" + join(where, key) + "': expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> integers(const json& j, const std::string& key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_array()) throw ConfigError("config field '" + join(where, key) + "': expected an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer())
      throw ConfigError("config field '" + join(where, key) + "': expected an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

LatticeWindow read_window(const json& cfg, Time horizon) {
  const auto& w = field(cfg, "window", "");
  int dim = integer(w, "dim", "window"), radius = integer(w, "radius", "window"), range = integer(w, "range", "window");
  try {
    return LatticeWindow(dim, radius, range, horizon);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field 'window': ") + e.what());
  }
}

Rates read_rates(const json& cfg, bool* allow_equal) {
  const auto& r = field(cfg, "rates", "");
  double l1 = number(r, "lambda1", "rates"), l2 = number(r, "lambda2", "rates");
  bool eq = flag(r, "allow_equal_rates", "rates", false);
  bool ok = l2 > 0 && (l1 > l2 || (eq && l1 == l2));
  if (!ok)
    throw ConfigError(fmt::format(
        "config field 'rates': lambda1 = {}, lambda2 = {} violates the global assumption λ1 > λ2 > 0"
        "{}",
        l1, l2, eq ? "" : " (set rates.allow_equal_rates for the symmetric comparison)"));
  if (allow_equal) *allow_equal = eq;
  return {l1, l2};
}

est::MultitypeParams read_params(const json& cfg) {
  est::MultitypeParams p;
  bool eq = false;
  Rates r = read_rates(cfg, &eq);
  p.horizon = number(cfg, "horizon", "");
  auto w = read_window(cfg, p.horizon);
  p.dim = w.dim();
  p.radius = w.radius();
  p.range = w.range();
  p.lambda1 = r.lambda1;
  p.lambda2 = r.lambda2;
  p.allow_equal_rates = eq;
  if (auto it = cfg.find("lambda_c_hi"); it != cfg.end()) p.lambda_c_hi = number(cfg, "lambda_c_hi", "");
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return p;
}

Coord read_coord(const json& j, const std::string& where, int dim) {
  if (!j.is_array()) throw ConfigError("config field '" + where + "': expected a coordinate array");
  Coord c;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ConfigError("config field '" + where + "': coordinates must be integers");
    c.push_back(e.get<int>());
  }
  if (static_cast<int>(c.size()) != dim)
    throw ConfigError(fmt::format("config field '{}': expected {} coordinates, got {}", where, dim, c.size()));
  return c;
}

SiteIndex read_site(const LatticeWindow& w, const json& j, const std::string& where) {
  auto c = read_coord(j, where, w.dim());
  auto s = w.find(c);
  if (!s) throw ConfigError("config field '" + where + "': site outside the window");
  return *s;
}

walk::StepDistribution read_steps(const json& j, const std::string& where) {
  auto pairs = [&](const std::string& key) {
    const auto& v = field(j, key, where);
    if (!v.is_array() || v.empty())
      throw ConfigError("config field '" + join(where, key) + "': expected [[value, weight], ...]");
    std::vector<std::pair<double, double>> out;
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError("config field '" + join(where, key) + "': expected [[value, weight], ...]");
      out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
  };
  std::vector<std::pair<int, double>> x;
  for (auto [v, p] : pairs("x")) {
    if (v != std::floor(v)) throw ConfigError("config field '" + join(where, "x") + "': steps must be integers");
    x.push_back({static_cast<int>(v), p});
  }
  try {
    return walk::StepDistribution(std::move(x), pairs("tau"));
  } catch (const std::exception& e) {
    throw ConfigError("config field '" + where + "': " + e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string out;
  for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

std::string config_hash(const json& cfg) { return sha256_hex(cfg.dump()); }

std::string timestamp() {
  std::time_t t;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"))
    t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  else
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Outputs::Outputs(std::filesystem::path dir, std::string hash, std::uint64_t seed)
    : dir_(std::move(dir)), hash_(std::move(hash)), seed_(seed) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void Outputs::write(const std::string& name, const std::string& data) {
  auto p = dir_ / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed: " + p.string());
  files_.push_back(name);
}

void Outputs::csv(const std::string& name, const std::string& body) {
  write(name, fmt::format("# config_hash={} seed={}\r\n", hash_, seed_) + body);
}

void Outputs::json_file(const std::string& name, const ojson& body) {
  ojson j;
  j["config_hash"] = hash_;
  j["seed"] = seed_;
  j["result"] = body;
  write(name, j.dump(2) + "\n");
}

void Outputs::svg(const std::string& name, const std::string& body) {
  auto nl = body.find('\n');
  std::string stamped = body.substr(0, nl + 1) +
                        fmt::format("<!-- config_hash={} seed={} -->\n", hash_, seed_) + body.substr(nl + 1);
  write(name, stamped);
}

std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::cell(const std::string& v) {
  if (in_row_++) out_ += ',';
  out_ += csv_escape(v);
}

CsvWriter& CsvWriter::add(const std::string& v) {
  cell(v);
  return *this;
}
CsvWriter& CsvWriter::add(double v) {
  cell(fmt::format("{}", v));
  return *this;
}
void CsvWriter::end_row() {
  if (in_row_ != width_) throw std::logic_error(fmt::format("csv row has {} cells, header {}", in_row_, width_));
  out_ += "\r\n";
  in_row_ = 0;
}

}  // namespace mtcp::cli
