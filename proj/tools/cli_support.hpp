#pragma once

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "mtcp/estimators.hpp"
#include "mtcp/harris.hpp"
#include "mtcp/lattice.hpp"
#include "mtcp/walk.hpp"

namespace mtcp::cli {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Bad user input; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON with // and /* */ comments.
json parse_config_text(const std::string& text);
json load_config(const std::filesystem::path& p);

// Required fields. `where` is the dotted path of j, used in messages.
const json& field(const json& j, const std::string& key, const std::string& where);
double number(const json& j, const std::string& key, const std::string& where);
int integer(const json& j, const std::string& key, const std::string& where);
std::size_t count(const json& j, const std::string& key, const std::string& where);
std::uint64_t seed_of(const json& j, const std::string& key, const std::string& where);
std::string text(const json& j, const std::string& key, const std::string& where);
bool flag(const json& j, const std::string& key, const std::string& where, bool fallback);
std::vector<double> numbers(const json& j, const std::string& key, const std::string& where);
std::vector<int> integers(const json& j, const std::string& key, const std::string& where);

std::string join(const std::string& where, const std::string& key);

LatticeWindow read_window(const json& cfg, Time horizon);
// Enforces lambda1 > lambda2 > 0; equality only with allow_equal_rates.
Rates read_rates(const json& cfg, bool* allow_equal = nullptr);
est::MultitypeParams read_params(const json& cfg);
Coord read_coord(const json& j, const std::string& where, int dim);
SiteIndex read_site(const LatticeWindow& w, const json& j, const std::string& where);
walk::StepDistribution read_steps(const json& j, const std::string& where);

std::string sha256_hex(const std::string& data);
// Hash of the canonical (sorted-key, compact) dump.
std::string config_hash(const json& cfg);

// UTC time from SOURCE_DATE_EPOCH when set, otherwise the clock.
std::string timestamp();

// Every file carries the config hash in its header: a leading comment line
// for CSV, a top-level field for JSON, an XML comment for SVG.
class Outputs {
 public:
  Outputs(std::filesystem::path dir, std::string hash, std::uint64_t seed);

  void csv(const std::string& name, const std::string& body);
  void json_file(const std::string& name, const ojson& body);
  void svg(const std::string& name, const std::string& body);

  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write(const std::string& name, const std::string& data);

  std::filesystem::path dir_;
  std::string hash_;
  std::uint64_t seed_;
  std::vector<std::string> files_;
};

// RFC 4180 record builder with CRLF line ends.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& add(const std::string& v);
  CsvWriter& add(double v);
  template <std::integral T>
  CsvWriter& add(T v) {
    cell(std::to_string(v));
    return *this;
  }
  void end_row();
  const std::string& str() const { return out_; }

 private:
  void cell(const std::string& v);
  std::size_t width_, in_row_ = 0;
  std::string out_;
};

std::string csv_escape(const std::string& v);

}  // namespace mtcp::cli
