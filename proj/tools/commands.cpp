#include "commands.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "mtcp/ancestor.hpp"
#include "mtcp/paths.hpp"
#include "mtcp/process.hpp"
#include "mtcp/render.hpp"
#include "mtcp/rng.hpp"

namespace mtcp::cli {

namespace {

ojson parsed(const std::string& s) { return ojson::parse(s); }

const json& section(const RunContext& c, const std::string& name) { return field(c.config, name, ""); }

Time horizon(const RunContext& c) { return number(c.config, "horizon", ""); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Sampled from window, rates and seed, or loaded from system_file (a
// system.json written by simulate, or a bare serialized system).
AugmentedHarrisSystem system_of(RunContext& c) {
  if (auto it = c.config.find("system_file"); it != c.config.end()) {
    std::string path = text(c.config, "system_file", "");
    std::string data = read_file(path);
    c.inputs.push_back({{"path", path}, {"sha256", sha256_hex(data)}});
    try {
      // Accept the hash envelope written by simulate.
      auto j = json::parse(data);
      if (j.contains("result") && j.contains("config_hash")) return harris_from_json(j["result"].dump());
      return harris_from_json(data);
    } catch (const std::exception& e) {
      throw ConfigError("config field 'system_file': " + std::string(e.what()));
    }
  }
  bool eq = false;
  Rates r = read_rates(c.config, &eq);
  auto w = read_window(c.config, horizon(c));
  return sample_harris(w, r, c.seed, SampleOptions{.allow_equal_rates = eq});
}

est::InitialCondition initial_of(const json& j, const std::string& where) {
  try {
    return est::parse_initial(text(j, "initial", where));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config field '" + join(where, "initial") + "': " + e.what());
  }
}

Configuration start_of(const RunContext& c, const LatticeWindow& w) {
  return initial_of(c.config, "").build(w, run_seed(~c.seed, 0));
}

PathMode mode_of(const json& j, const std::string& where) {
  auto m = text(j, "mode", where);
  if (m == "bip") return PathMode::bip;
  if (m == "sip") return PathMode::sip;
  throw ConfigError("config field '" + join(where, "mode") + "': expected \"bip\" or \"sip\"");
}

Origin origin_of(const LatticeWindow& w, const json& j, const std::string& where) {
  return Origin{.site = read_site(w, field(j, "x", where), join(where, "x")), .time = number(j, "t", where)};
}

std::vector<SiteIndex> sites_of(const LatticeWindow& w, const json& j, const std::string& key,
                                const std::string& where) {
  const auto& v = field(j, key, where);
  if (v.is_string() && v.get<std::string>() == "all") return all_sites(w);
  if (!v.is_array()) throw ConfigError("config field '" + join(where, key) + "': expected \"all\" or a list of sites");
  std::vector<SiteIndex> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(read_site(w, v[i], fmt::format("{}[{}]", join(where, key), i)));
  return out;
}

std::vector<std::string> coord_header(const std::string& prefix, int dim) {
  std::vector<std::string> h;
  for (int k = 1; k <= dim; ++k) h.push_back(prefix + std::to_string(k));
  return h;
}

template <class... V>
std::vector<std::string> cat(std::vector<std::string> a, const V&... rest) {
  (a.insert(a.end(), rest.begin(), rest.end()), ...);
  return a;
}

void add_coord(CsvWriter& csv, std::span<const int> x) {
  for (int v : x) csv.add(v);
}

void add_blank(CsvWriter& csv, int n) {
  for (int k = 0; k < n; ++k) csv.add(std::string());
}

// ---- simulate / evolve-query -------------------------------------------

void cmd_simulate(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  auto xi0 = start_of(c, w);
  auto tr = evolve(xi0, h, w.horizon());

  CsvWriter ev(cat({"time", "kind"}, coord_header("x", w.dim()), coord_header("y", w.dim())));
  for (const auto& e : h.events()) {
    ev.add(e.time).add(std::string(to_string(e.kind)));
    if (e.kind == EventKind::death) {
      add_coord(ev, w.coord(e.index));
      add_blank(ev, w.dim());
    } else {
      add_coord(ev, w.coord(w.edge_from(e.index)));
      add_coord(ev, w.coord(w.edge_to(e.index)));
    }
    ev.end_row();
  }
  c.out->csv("events.csv", ev.str());

  std::ostringstream traj;
  write_trajectory_csv(traj, tr);
  c.out->csv("trajectory.csv", traj.str());

  if (c.config.contains("snapshot_times")) {
    auto times = numbers(c.config, "snapshot_times", "");
    for (Time t : times)
      if (t < 0 || t > w.horizon()) throw ConfigError("config field 'snapshot_times': times must lie in [0, horizon]");
    std::ostringstream snap;
    write_snapshots_csv(snap, tr, times);
    c.out->csv("snapshots.csv", snap.str());
  }
  c.out->json_file("system.json", parsed(to_json(h)));

  const auto& fin = tr.final_configuration();
  ojson s;
  s["events"] = {{"death", h.count(EventKind::death)},
                 {"arrow", h.count(EventKind::arrow)},
                 {"selective", h.count(EventKind::selective)}};
  s["transitions"] = tr.log().size();
  s["final"] = {{"ones", fin.count(1)}, {"twos", fin.count(2)}};
  s["boundary_contact"] = tr.boundary_contact();
  c.out->json_file("summary.json", s);
  c.censoring = {{"horizon", w.horizon()}, {"boundary_contact", tr.boundary_contact()}};
}

void cmd_evolve_query(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  auto xi0 = start_of(c, w);
  const auto& q = section(c, "query");
  auto process = text(q, "process", "query");
  Trajectory tr = [&] {
    if (process == "multitype") return evolve(xi0, h, w.horizon());
    if (process == "one_type_lambda2") return evolve_one_type(xi0, h, OneTypeRate::lambda2_only, w.horizon());
    if (process == "one_type_lambda1")
      return evolve_one_type(xi0, h, OneTypeRate::lambda1_with_selective, w.horizon());
    throw ConfigError(
        "config field 'query.process': expected multitype, one_type_lambda2 or one_type_lambda1");
  }();
  const auto& pts = field(q, "points", "query");
  if (!pts.is_array()) throw ConfigError("config field 'query.points': expected a list of {x, t}");
  CsvWriter csv(cat(coord_header("x", w.dim()), std::vector<std::string>{"t", "state", "state_before"}));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string where = fmt::format("query.points[{}]", i);
    auto o = origin_of(w, pts[i], where);
    if (o.time < 0 || o.time > w.horizon()) throw ConfigError("config field '" + where + ".t': outside [0, horizon]");
    add_coord(csv, w.coord(o.site));
    csv.add(o.time).add(int(tr.state_at(o.site, o.time))).add(int(tr.state_at(o.site, o.time, true)));
    csv.end_row();
  }
  c.out->csv("queries.csv", csv.str());
  c.censoring = {{"horizon", w.horizon()}, {"boundary_contact", tr.boundary_contact()}};
}

// ---- paths / ancestor / renewal ------------------------------------------

ojson class_json(const PathClass& k) {
  return {{"bip", k.is_bip}, {"sip", k.is_sip}, {"fbip", k.is_fbip},
          {"fsip", k.is_fsip}, {"rfbip", k.is_rfbip}, {"rfsip", k.is_rfsip}};
}

void cmd_paths(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  const auto& p = section(c, "paths");
  auto mode = mode_of(p, "paths");
  Time s = number(p, "s", "paths"), t = number(p, "t", "paths");
  if (!(0 <= s && s <= t && t <= w.horizon())) throw ConfigError("config fields 'paths.s', 'paths.t': need 0 <= s <= t <= horizon");
  auto sources = sites_of(w, p, "sources", "paths");
  auto targets = sites_of(w, p, "targets", "paths");
  auto cap = count(p, "event_cap", "paths");
  auto list = enumerate_paths(h, sources, s, targets, t, mode, cap);

  CsvWriter csv(cat(std::vector<std::string>{"index", "jumps"}, coord_header("start", w.dim()),
                    coord_header("end", w.dim()),
                    std::vector<std::string>{"bip", "sip", "fbip", "fsip", "rfbip", "rfsip", "path"}));
  ojson all = ojson::array();
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& g = list[i];
    auto k = classify(h, g, s, t);
    csv.add(i).add(g.jumps.size());
    add_coord(csv, w.coord(g.start));
    add_coord(csv, w.coord(g.end()));
    csv.add(k.is_bip).add(k.is_sip).add(k.is_fbip).add(k.is_fsip).add(k.is_rfbip).add(k.is_rfsip);
    csv.add(path_to_json(w, g));
    csv.end_row();
    all.push_back({{"path", parsed(path_to_json(w, g))}, {"class", class_json(k)}});
  }
  c.out->csv("paths.csv", csv.str());

  ojson fb = ojson::array();
  for (SiteIndex x : targets) {
    auto f = find_fbip(h, s, x, t);
    ojson e{{"target", w.coord_vec(x)}, {"t", t}};
    e["fbip"] = f ? parsed(path_to_json(w, *f)) : ojson(nullptr);
    fb.push_back(e);
  }
  ojson summary{{"mode", mode == PathMode::bip ? "bip" : "sip"}, {"s", s}, {"t", t}, {"count", list.size()}};
  summary["paths"] = all;
  summary["fbip_by_target"] = fb;
  c.out->json_file("paths.json", summary);
  c.censoring = {{"paths", list.size()}};
}

void cmd_ancestor(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  const auto& a = section(c, "ancestor");
  auto o = origin_of(w, field(a, "origin", "ancestor"), "ancestor.origin");
  auto times = numbers(a, "times", "ancestor");
  for (Time t : times)
    if (t < o.time || t > w.horizon())
      throw ConfigError("config field 'ancestor.times': times must lie in [origin.t, horizon]");
  int L = integer(a, "L", "ancestor");
  auto tr = ancestor_track(h, o, times);
  CsvWriter csv(cat(std::vector<std::string>{"t", "alive"}, coord_header("x", w.dim())));
  std::size_t dead = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    csv.add(tr.times[i]).add(tr.values[i].has_value());
    if (tr.values[i]) add_coord(csv, w.coord(*tr.values[i]));
    else add_blank(csv, w.dim()), ++dead;
    csv.end_row();
  }
  c.out->csv("ancestor.csv", csv.str());

  ojson bs = ojson::array();
  try {
    for (const auto& b : find_bifurcations(h, L, o))
      bs.push_back({{"time", b.time}, {"pivot", w.coord_vec(b.pivot)}, {"t_minus", b.t_minus}, {"t_plus", b.t_plus}});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'ancestor.L': ") + e.what());
  }
  c.out->json_file("bifurcations.json", ojson{{"L", L}, {"bifurcations", bs}});
  c.censoring = {{"cemetery_times", dead}, {"bifurcations", bs.size()}};
}

void cmd_renewal(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  const auto& r = section(c, "renewal");
  int L = integer(r, "L", "renewal");
  auto o = origin_of(w, field(r, "origin", "renewal"), "renewal.origin");
  auto depth = integer(r, "steered_depth", "renewal");
  auto rp = build_renewal_point(h, L, o);
  c.out->json_file("renewal.json", parsed(renewal_to_json(h, L, rp)));

  CsvWriter csv(cat(std::vector<std::string>{"found", "case", "t", "selective_event"}, coord_header("x", w.dim())));
  csv.add(rp.found).add(rp.case_tag).add(rp.t).add(rp.selective_event);
  if (rp.found) add_coord(csv, rp.x);
  else add_blank(csv, w.dim());
  csv.end_row();
  c.out->csv("renewal.csv", csv.str());

  ojson cens{{"found", rp.found}, {"reason", rp.reason}};
  if (depth > 0) {
    auto sq = steered_sequence(h, L, o.site, depth);
    c.out->json_file("steered.json", parsed(steered_to_json(h, L, sq)));
    CsvWriter st(cat(std::vector<std::string>{"step", "t"}, coord_header("x", w.dim()), coord_header("s", w.dim())));
    for (std::size_t i = 0; i < sq.steps.size(); ++i) {
      st.add(i).add(sq.steps[i].time);
      add_coord(st, w.coord(sq.steps[i].site));
      add_coord(st, sq.steps[i].s);
      st.end_row();
    }
    c.out->csv("steered.csv", st.str());
    cens["steered_truncated"] = sq.truncated;
    cens["steered_steps"] = sq.steps.size();
  }
  c.censoring = cens;
}

// ---- walk ------------------------------------------------------------------

walk::Region region_of(const json& j, const std::string& where) {
  auto end = [&](const char* key, double inf) {
    const auto& v = field(j, key, where);
    if (v.is_null()) return inf;
    return number(j, key, where);
  };
  walk::Region r{end("lo", -std::numeric_limits<double>::infinity()),
                 end("hi", std::numeric_limits<double>::infinity()), flag(j, "lo_open", where, false),
                 flag(j, "hi_open", where, false)};
  if (!std::isfinite(r.lo)) r.lo_open = true;
  if (!std::isfinite(r.hi)) r.hi_open = true;
  try {
    r.validate();
  } catch (const std::exception& e) {
    throw ConfigError("config field '" + where + "': " + e.what());
  }
  return r;
}

walk::Track track_of(const std::string& s, const std::string& where) {
  if (s == "S") return walk::Track::S;
  if (s == "S_plus") return walk::Track::S_plus;
  if (s == "T") return walk::Track::T;
  throw ConfigError("config field '" + where + "': expected S, S_plus or T");
}

void cmd_walk(RunContext& c) {
  const auto& j = section(c, "walk");
  auto d = read_steps(field(j, "steps", "walk"), "walk.steps");
  auto run = walk::simulate_walk(d, integer(j, "x0", "walk"), number(j, "t0", "walk"), count(j, "n_steps", "walk"),
                                 c.seed);
  if (j.contains("hits")) {
    const auto& hs = field(j, "hits", "walk");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      std::string where = fmt::format("walk.hits[{}]", i);
      run.record(track_of(text(hs[i], "track", where), join(where, "track")),
                 region_of(field(hs[i], "region", where), join(where, "region")));
    }
  }
  CsvWriter csv({"n", "X", "S", "S_plus", "T"});
  for (std::size_t n = 0; n < run.S.size(); ++n) {
    csv.add(n);
    if (n == 0) csv.add(std::string());
    else csv.add(run.X[n - 1]);
    csv.add(run.S[n]).add(run.S_plus[n]).add(run.T[n]).end_row();
  }
  c.out->csv("walk.csv", csv.str());
  c.out->json_file("walk.json", parsed(walk::to_json(run)));
  std::size_t censored = 0;
  for (const auto& h : run.hits) censored += h.hit.censored;
  c.censoring = {{"steps", run.steps()}, {"censored_hits", censored}};
}

// ---- estimators ------------------------------------------------------------

const json& est_section(const RunContext& c) { return section(c, "estimate"); }

void lambda_c(RunContext& c) {
  const auto& e = est_section(c);
  est::LambdaCConfig cfg;
  auto w = read_window(c.config, horizon(c));
  cfg.dim = w.dim();
  cfg.radius = w.radius();
  cfg.range = w.range();
  cfg.horizon = w.horizon();
  cfg.grid = numbers(e, "grid", "estimate");
  cfg.n_runs = count(e, "n_runs", "estimate");
  cfg.threshold = number(e, "threshold", "estimate");
  cfg.bisection_steps = integer(e, "bisection_steps", "estimate");
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  auto r = est::estimate_lambda_c(cfg);
  CsvWriter csv({"lambda", "half_hits", "half_n", "full_hits", "full_n"});
  for (const auto& p : r.curve) csv.add(p.lambda).add(p.half.hits).add(p.half.n).add(p.full.hits).add(p.full.n).end_row();
  c.out->csv("curve.csv", csv.str());
  c.out->json_file("lambda_c.json", parsed(est::to_json(r)));
  c.censoring = {{"note", r.label}};
}

CsvWriter runs_csv(const std::vector<est::RunObservation>& obs) {
  CsvWriter csv({"run", "ones_half", "ones_end", "twos_half", "twos_end", "boundary", "cone_slope"});
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    csv.add(i).add(o.ones_half).add(o.ones_end).add(o.twos_half).add(o.twos_end).add(o.boundary).add(o.cone_slope);
    csv.end_row();
  }
  return csv;
}

void survival(RunContext& c) {
  const auto& e = est_section(c);
  auto p = read_params(c.config);
  auto init = initial_of(e, "estimate");
  auto obs = est::run_ensemble(p, init, count(e, "n_runs", "estimate"), c.seed, {}, c.threads);
  auto r = est::summarize_survival(p, init, obs);
  c.out->csv("runs.csv", runs_csv(obs).str());
  c.out->json_file("survival.json", parsed(est::to_json(r)));
  c.censoring = {{"boundary_runs", r.boundary_runs}, {"n_runs", r.n_runs}};
}

void cone(RunContext& c) {
  const auto& e = est_section(c);
  auto p = read_params(c.config);
  est::InitialCondition init;
  init.kind = est::InitialCondition::Kind::single_one_in_twos;
  est::ObservationSpec spec;
  spec.cone = true;
  spec.cone_from = number(e, "cone_from", "estimate");
  auto obs = est::run_ensemble(p, init, count(e, "n_runs", "estimate"), c.seed, spec, c.threads);
  auto r = est::summarize_cone(obs, number(e, "quantile", "estimate"));
  auto s = est::summarize_survival(p, init, obs);
  c.out->csv("runs.csv", runs_csv(obs).str());
  ojson j = parsed(est::to_json(r));
  j["survival"] = parsed(est::to_json(s));
  c.out->json_file("cone.json", j);
  c.censoring = {{"boundary_runs", s.boundary_runs}, {"survivors", r.survivors}};
}

void convergence(RunContext& c) {
  const auto& e = est_section(c);
  est::ConvergenceConfig cfg;
  cfg.params = read_params(c.config);
  cfg.init = initial_of(e, "estimate");
  const auto& ws = field(e, "window_sites", "estimate");
  if (!ws.is_array()) throw ConfigError("config field 'estimate.window_sites': expected a list of sites");
  for (std::size_t i = 0; i < ws.size(); ++i)
    cfg.window.push_back(read_coord(ws[i], fmt::format("estimate.window_sites[{}]", i), cfg.params.dim));
  cfg.n_runs = count(e, "n_runs", "estimate");
  cfg.n_reference = count(e, "n_reference", "estimate");
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  auto r = est::complete_convergence_check(cfg);
  CsvWriter csv({"cell", "empirical", "mu1", "mu2", "mixture"});
  for (std::size_t k = 0; k < r.empirical.size(); ++k)
    csv.add(k).add(r.empirical[k]).add(r.mu1[k]).add(r.mu2[k]).add(r.mixture[k]).end_row();
  c.out->csv("histogram.csv", csv.str());
  c.out->json_file("convergence.json", parsed(est::to_json(r)));
  c.censoring = {{"t", r.t}};
}

void bounds(RunContext& c) {
  const auto& e = est_section(c);
  est::BoundConfig cfg;
  auto w = read_window(c.config, horizon(c));
  cfg.dim = w.dim();
  cfg.radius = w.radius();
  cfg.range = w.range();
  cfg.horizon = w.horizon();
  cfg.lambda = number(e, "lambda", "estimate");
  cfg.fixed = number(e, "fixed", "estimate");
  cfg.grid = numbers(e, "grid", "estimate");
  cfg.n_runs = count(e, "n_runs", "estimate");
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  est::Bound which;
  try {
    which = est::parse_bound(text(e, "which", "estimate"));
  } catch (const std::invalid_argument& x) {
    throw ConfigError(std::string("config field 'estimate.which': ") + x.what());
  }
  auto r = est::bound_fit(which, cfg);
  CsvWriter csv({"x", "hits", "n"});
  for (const auto& p : r.points) csv.add(p.x).add(p.k).add(p.n).end_row();
  c.out->csv("points.csv", csv.str());
  c.out->json_file("bound.json", parsed(est::to_json(r)));
  c.censoring = {{"horizon", cfg.horizon}};
}

void audit_from(RunContext& c, const json& a, const std::string& where) {
  est::AuditConfig cfg;
  cfg.params = read_params(c.config);
  cfg.n_trajectories = count(a, "n_trajectories", where);
  cfg.n_gset = count(a, "n_gset", where);
  cfg.n_coupling = count(a, "n_coupling", where);
  cfg.n_block = count(a, "n_block", where);
  if (cfg.n_block > 0) {
    cfg.block_sizes = integers(a, "block_sizes", where);
    try {
      cfg.block_params = read_params(field(a, "block_params", where));
    } catch (const ConfigError& x) {
      throw ConfigError(std::string(x.what()) + " (in " + join(where, "block_params") + ")");
    }
  }
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  auto r = est::invariant_audit(cfg);
  CsvWriter csv({"item", "exact", "checks", "violations", "pass", "detail"});
  for (const auto& i : r.items)
    csv.add(i.name).add(i.exact).add(i.checks).add(i.violations).add(i.pass).add(i.detail).end_row();
  c.out->csv("audit.csv", csv.str());
  c.out->json_file("audit.json", parsed(est::to_json(r)));
  c.censoring = {{"exact_violations", r.exact_violations()}, {"pass", r.pass()}};
}

void audit_estimator(RunContext& c) { audit_from(c, est_section(c), "estimate"); }

est::DriftConfig drift_config(const RunContext& c) {
  const auto& e = est_section(c);
  est::DriftConfig cfg;
  auto p = read_params(c.config);
  if (p.dim != 1 || p.range != 1) throw ConfigError("config field 'window': drift experiments need dim = 1, range = 1");
  cfg.radius = p.radius;
  cfg.lambda1 = p.lambda1;
  cfg.lambda2 = p.lambda2;
  cfg.horizon = p.horizon;
  cfg.L = integer(e, "L", "estimate");
  cfg.n_surviving = count(e, "n_surviving", "estimate");
  cfg.max_runs = count(e, "max_runs", "estimate");
  cfg.conf = number(e, "conf", "estimate");
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  return cfg;
}

void drift_common(RunContext& c, bool planted) {
  auto cfg = drift_config(c);
  auto r = planted ? est::planted_drift(cfg) : est::drift_run(cfg);
  CsvWriter csv({"index", "x_e1"});
  for (std::size_t i = 0; i < r.x.size(); ++i) csv.add(i).add(r.x[i]).end_row();
  c.out->csv("drift.csv", csv.str());
  c.out->json_file("drift.json", parsed(est::to_json(r)));
  c.censoring = {{"runs", r.runs}, {"surviving", r.surviving}, {"found", r.found}, {"note", r.note}};
}

void lscan(RunContext& c) {
  auto cfg = drift_config(c);
  const auto& e = est_section(c);
  auto r = est::l_scan(cfg, integers(e, "Ls", "estimate"), count(e, "n_runs", "estimate"));
  CsvWriter csv({"L", "conditioned", "found", "mean", "ci_lo", "ci_hi"});
  for (const auto& p : r.points)
    csv.add(p.L).add(p.conditioned).add(p.found).add(p.mean.mean).add(p.mean.ci.lo).add(p.mean.ci.hi).end_row();
  c.out->csv("lscan.csv", csv.str());
  c.out->json_file("lscan.json", parsed(est::to_json(r)));
  c.censoring = {{"chosen", r.chosen ? ojson(*r.chosen) : ojson(nullptr)}};
}

void overshoot(RunContext& c) {
  const auto& e = est_section(c);
  auto d = read_steps(field(e, "steps", "estimate"), "estimate.steps");
  int ell = integer(e, "ell", "estimate");
  auto xs = integers(e, "x", "estimate");
  auto n = count(e, "n_runs", "estimate");
  auto max_steps = count(e, "max_steps", "estimate");
  CsvWriter csv({"x", "lhs", "lhs_se", "rhs", "n_runs", "events", "censored", "pass"});
  ojson all = ojson::array();
  std::size_t censored = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto r = walk::overshoot_bound_check(d, ell, xs[i], n, run_seed(c.seed, i), c.threads, max_steps);
    csv.add(xs[i]).add(r.lhs).add(r.lhs_se).add(r.rhs).add(r.n_runs).add(r.events).add(r.censored).add(r.pass).end_row();
    all.push_back({{"x", xs[i]}, {"lhs", r.lhs}, {"lhs_se", r.lhs_se}, {"rhs", r.rhs},
                   {"renewal_partial", r.visits.partial}, {"renewal_tail", r.visits.tail_bound},
                   {"tail_sum", r.tail_sum}, {"events", r.events}, {"censored", r.censored}, {"pass", r.pass}});
    censored += r.censored;
  }
  c.out->csv("overshoot.csv", csv.str());
  c.out->json_file("overshoot.json", ojson{{"ell", ell}, {"checks", all}});
  c.censoring = {{"censored_runs", censored}};
}

void cone_walk(RunContext& c) {
  const auto& e = est_section(c);
  auto d = read_steps(field(e, "steps", "estimate"), "estimate.steps");
  double beta = number(e, "beta", "estimate");
  if (beta >= d.beta_bar())
    throw ConfigError(fmt::format("config field 'estimate.beta': beta = {} must be below beta_bar = {}", beta,
                                  d.beta_bar()));
  auto r = walk::cone_experiment(d, beta, number(e, "ell", "estimate"), number(e, "t", "estimate"),
                                 count(e, "n_runs", "estimate"), integer(e, "x0", "estimate"), c.seed, c.threads);
  auto ci = r.box.wilson();
  CsvWriter csv({"hits", "n", "frequency", "wilson_lo", "wilson_hi", "start_in_cone"});
  csv.add(r.box.hits).add(r.box.n).add(r.box.value()).add(ci.lo).add(ci.hi).add(r.start_in_cone).end_row();
  c.out->csv("cone_walk.csv", csv.str());
  c.out->json_file("cone_walk.json", ojson{{"beta", beta}, {"beta_bar", d.beta_bar()}, {"hits", r.box.hits},
                                           {"n", r.box.n}, {"frequency", r.box.value()},
                                           {"wilson", {ci.lo, ci.hi}}, {"start_in_cone", r.start_in_cone}});
  c.censoring = {{"start_in_cone", r.start_in_cone}};
}

void cmd_estimate(RunContext& c) {
  auto name = text(est_section(c), "name", "estimate");
  const auto& table = estimators();
  auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("config field 'estimate.name': unknown estimator '" + name + "' (known: " + known + ")");
  }
  it->second(c);
}

void cmd_audit(RunContext& c) { audit_from(c, section(c, "audit"), "audit"); }

// ---- render ----------------------------------------------------------------

void cmd_render(RunContext& c) {
  auto h = system_of(c);
  const auto& w = h.window();
  const auto& r = section(c, "render");
  DiagramSpec spec;
  spec.t_lo = number(r, "t_lo", "render");
  spec.t_hi = number(r, "t_hi", "render");
  spec.x_lo = integer(r, "x_lo", "render");
  spec.x_hi = integer(r, "x_hi", "render");
  spec.site_px = number(r, "site_px", "render");
  spec.time_px = number(r, "time_px", "render");
  spec.layers.clear();
  const auto& ls = field(r, "layers", "render");
  if (!ls.is_array()) throw ConfigError("config field 'render.layers': expected a list of layer names");
  for (const auto& l : ls) {
    try {
      spec.layers.push_back(parse_layer(l.get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config field 'render.layers': ") + e.what());
    }
  }
  auto has = [&](Layer l) { return std::find(spec.layers.begin(), spec.layers.end(), l) != spec.layers.end(); };

  DiagramData data;
  data.system = &h;
  std::optional<Trajectory> tr;
  if (has(Layer::trajectory)) {
    tr = evolve(start_of(c, w), h, w.horizon());
    data.trajectory = &*tr;
  }
  if (has(Layer::ancestor)) data.ancestor = origin_of(w, field(r, "ancestor", "render"), "render.ancestor");
  if (has(Layer::paths)) {
    const auto& ps = field(r, "paths", "render");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      std::string where = fmt::format("render.paths[{}]", i);
      StyledPath sp;
      sp.dashed = flag(ps[i], "dashed", where, false);
      sp.label = ps[i].contains("label") ? text(ps[i], "label", where) : std::string();
      if (ps[i].contains("path")) {
        sp.path = path_from_json(w, field(ps[i], "path", where).dump());
      } else {
        auto kind = text(ps[i], "find", where);
        auto x = read_site(w, field(ps[i], "x", where), join(where, "x"));
        Time s = number(ps[i], "s", where), t = number(ps[i], "t", where);
        std::optional<InfectionPath> g;
        if (kind == "fbip") g = find_fbip(h, s, x, t);
        else if (kind == "rfbip") g = find_rfbip(h, x, s, t);
        else throw ConfigError("config field '" + join(where, "find") + "': expected fbip or rfbip");
        if (!g) continue;  // no such path in this system
        sp.path = *g;
      }
      data.paths.push_back(sp);
    }
  }
  if (has(Layer::boxes)) {
    const auto& bs = field(r, "boxes", "render");
    for (std::size_t i = 0; i < bs.size(); ++i) {
      std::string where = fmt::format("render.boxes[{}]", i);
      data.boxes.push_back({.x_lo = number(bs[i], "x_lo", where), .x_hi = number(bs[i], "x_hi", where),
                            .t_lo = number(bs[i], "t_lo", where), .t_hi = number(bs[i], "t_hi", where),
                            .label = bs[i].contains("label") ? text(bs[i], "label", where) : std::string()});
    }
  }
  if (has(Layer::bifurcation)) {
    const auto& b = field(r, "bifurcation", "render");
    data.L = integer(b, "L", "render.bifurcation");
    data.bifurcations =
        find_bifurcations(h, data.L, origin_of(w, field(b, "origin", "render.bifurcation"), "render.bifurcation.origin"));
  }
  try {
    c.out->svg("diagram.svg", render_svg(spec, data));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'render': ") + e.what());
  }
  std::size_t snaps = 0;
  if (r.contains("snapshot_times")) {
    if (w.dim() < 2) throw ConfigError("config field 'render.snapshot_times': snapshots need dim >= 2");
    auto traj = tr ? *tr : evolve(start_of(c, w), h, w.horizon());
    for (Time t : numbers(r, "snapshot_times", "render")) {
      if (t < 0 || t > w.horizon()) throw ConfigError("config field 'render.snapshot_times': outside [0, horizon]");
      c.out->svg(fmt::format("snapshot_{}.svg", snaps++), render_snapshot_svg(traj.configuration_at(t)));
    }
  }
  c.censoring = {{"bifurcations", data.bifurcations.size()}, {"snapshots", snaps}};
}

}  // namespace

const std::map<std::string, Command>& estimators() {
  static const std::map<std::string, Command> table{
      {"estimate_lambda_c", lambda_c},
      {"estimate_survival", survival},
      {"estimate_cone", cone},
      {"complete_convergence_check", convergence},
      {"bound_fit", bounds},
      {"invariant_audit", audit_estimator},
      {"drift_run", [](RunContext& c) { drift_common(c, false); }},
      {"planted_drift", [](RunContext& c) { drift_common(c, true); }},
      {"l_scan", lscan},
      {"overshoot_bound_check", overshoot},
      {"cone_experiment", cone_walk},
  };
  return table;
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"simulate", cmd_simulate}, {"evolve-query", cmd_evolve_query}, {"paths", cmd_paths},
      {"ancestor", cmd_ancestor}, {"renewal", cmd_renewal},           {"walk", cmd_walk},
      {"estimate", cmd_estimate}, {"render", cmd_render},             {"audit", cmd_audit},
  };
  return table;
}

json resolve_config(json cfg, const Overrides& o) {
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.horizon) cfg["horizon"] = *o.horizon;
  seed_of(cfg, "seed", "");
  if (cfg.contains("horizon")) {
    double h = number(cfg, "horizon", "");
    if (!(h >= 0)) throw ConfigError("config field 'horizon': must be non-negative");
  }
  return cfg;
}

ojson run_command(const std::string& name, const json& resolved, const std::string& out_dir, int threads) {
  auto it = commands().find(name);
  if (it == commands().end()) throw ConfigError("unknown subcommand '" + name + "'");
  RunContext c;
  c.config = resolved;
  c.seed = seed_of(resolved, "seed", "");
  c.threads = threads;
  std::string hash = config_hash(resolved);
  Outputs out(out_dir, hash, c.seed);
  c.out = &out;
  std::string started = timestamp();
  it->second(c);

  ojson m;
  m["subcommand"] = name;
  m["config_hash"] = hash;
  m["seed"] = c.seed;
  m["started"] = started;
  m["finished"] = timestamp();
  m["outputs"] = out.files();
  m["inputs"] = c.inputs;
  m["censoring"] = c.censoring;
  m["config"] = ojson::parse(resolved.dump());
  std::ofstream f(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary | std::ios::trunc);
  f << m.dump(2) << "\n";
  if (!f) throw std::runtime_error("cannot write manifest.json");
  return m;
}

}  // namespace mtcp::cli
