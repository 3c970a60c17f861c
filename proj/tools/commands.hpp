#pragma once

#include <functional>
#include <map>
#include <string>

#include "cli_support.hpp"

namespace mtcp::cli {

struct RunContext {
  json config;  // resolved: overrides applied, seed and horizon filled in
  std::uint64_t seed = 0;
  int threads = 0;
  Outputs* out = nullptr;
  ojson censoring = ojson::object();
  ojson inputs = ojson::array();  // files read, with their hashes
};

using Command = std::function<void(RunContext&)>;

const std::map<std::string, Command>& commands();
const std::map<std::string, Command>& estimators();

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
};

// Applies overrides, checks that seed is present, returns the resolved config.
json resolve_config(json cfg, const Overrides& o);

// Runs one subcommand into out_dir and writes manifest.json there.
// Returns the manifest.
ojson run_command(const std::string& name, const json& resolved, const std::string& out_dir, int threads);

}  // namespace mtcp::cli
