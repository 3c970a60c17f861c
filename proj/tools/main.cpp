#include <CLI11.hpp>

#include <fmt/format.h>

#include <fstream>
#include <iostream>

#include "commands.hpp"
#include "mtcp/paths.hpp"

using namespace mtcp::cli;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::string out = ".";
  int threads = 0;
  std::string manifest;
};

// Manifest inputs must still hash to the recorded values.
void check_inputs(const json& m) {
  if (!m.contains("inputs")) return;
  for (const auto& in : m["inputs"]) {
    std::ifstream f(in.at("path").get<std::string>(), std::ios::binary);
    if (!f) throw ConfigError("manifest input missing: " + in.at("path").get<std::string>());
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (sha256_hex(data) != in.at("sha256").get<std::string>())
      throw ConfigError("manifest input changed since the recorded run: " + in.at("path").get<std::string>());
  }
}

int fail(int code, const std::string& msg) {
  std::cerr << "mtcp: " << msg << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitype contact process toolkit"};
  app.require_subcommand(1);
  Options opt;

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> blurbs{
      {"simulate", "sample a system, evolve the start configuration, write events and trajectory"},
      {"evolve-query", "state of a process at listed space-time points"},
      {"paths", "enumerate and classify infection paths"},
      {"ancestor", "ancestor process and bifurcation times"},
      {"renewal", "renewal point and steered sequence"},
      {"walk", "random walk with a finite step law"},
      {"estimate", "run a named estimator"},
      {"render", "space-time diagram as SVG"},
      {"audit", "pathwise invariant audit"},
  };
  for (const auto& [name, cmd] : commands()) {
    auto* s = app.add_subcommand(name, blurbs.at(name));
    s->add_option("--config", opt.config, "config file (JSON, comments allowed)")->required()->check(CLI::ExistingFile);
    s->add_option("--seed", opt.seed, "master seed, overrides the config");
    s->add_option("--out", opt.out, "output directory")->capture_default_str();
    s->add_option("--horizon", opt.horizon, "time horizon, overrides the config");
    s->add_option("--threads", opt.threads, "worker threads (default: MTCP_THREADS, then all cores)");
    subs[name] = s;
  }
  auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest");
  rerun->add_option("--manifest", opt.manifest, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out", opt.out, "output directory")->capture_default_str();
  rerun->add_option("--threads", opt.threads, "worker threads (default: MTCP_THREADS, then all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    std::string name;
    json cfg;
    if (rerun->parsed()) {
      json m = load_config(opt.manifest);
      name = m.at("subcommand").get<std::string>();
      check_inputs(m);
      cfg = resolve_config(m.at("config"), {});
    } else {
      for (const auto& [n, s] : subs)
        if (s->parsed()) name = n;
      cfg = resolve_config(load_config(opt.config), {opt.seed, opt.horizon});
    }
    auto m = run_command(name, cfg, opt.out, opt.threads);
    std::cout << fmt::format("{}: {} file(s) in {}, config {}\n", name, m["outputs"].size(), opt.out,
                             m["config_hash"].get<std::string>().substr(0, 12));
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(2, e.what());
  } catch (const mtcp::CapExceeded& e) {
    return fail(1, std::string("enumeration cap exceeded: ") + e.what());
  } catch (const std::exception& e) {
    return fail(1, e.what());
  }
}
