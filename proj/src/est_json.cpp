#include "json.hpp"
#include "mtcp/estimators.hpp"

namespace mtcp::est {

namespace {

using J = nlohmann::ordered_json;

J freq(const Frequency& f) {
  auto ci = f.wilson();
  return J{{"hits", f.hits}, {"n", f.n}, {"value", f.value()}, {"wilson", {ci.lo, ci.hi}}};
}

J interval(const stats::Interval& i) { return J::array({i.lo, i.hi}); }

J mean(const stats::MeanCi& m) {
  return J{{"n", m.n}, {"mean", m.mean}, {"se", m.se}, {"ci", interval(m.ci)}};
}

J params(const MultitypeParams& p) {
  J j{{"dim", p.dim}, {"radius", p.radius}, {"range", p.range}, {"lambda1", p.lambda1},
      {"lambda2", p.lambda2}, {"horizon", p.horizon}, {"allow_equal_rates", p.allow_equal_rates}};
  if (p.lambda_c_hi) j["lambda_c_hi"] = *p.lambda_c_hi;
  return j;
}

std::string dump(const J& j, int indent) { return j.dump(indent); }

}  // namespace

std::string to_json(const LambdaCEstimate& e, int indent) {
  J curve = J::array();
  for (const auto& p : e.curve)
    curve.push_back({{"lambda", p.lambda}, {"half", freq(p.half)}, {"full", freq(p.full)}});
  J j{{"label", e.label},
      {"dim", e.dim},
      {"range", e.range},
      {"radius", e.radius},
      {"horizon", e.horizon},
      {"threshold", e.threshold},
      {"n_runs", e.n_runs},
      {"curve", curve},
      {"crossing_half", {e.cross_half_lo, e.cross_half_hi}},
      {"crossing_full", {e.cross_full_lo, e.cross_full_hi}},
      {"bracket", {e.lo, e.hi}}};
  return dump(j, indent);
}

std::string to_json(const SurvivalEstimate& e, int indent) {
  J j{{"params", params(e.params)},
      {"initial", e.initial},
      {"n_runs", e.n_runs},
      {"ones_half", freq(e.s1_half)},
      {"ones_end", freq(e.s1_end)},
      {"twos_half", freq(e.s2_half)},
      {"twos_end", freq(e.s2_end)},
      {"ones_drift_paired", interval(e.s1_drift)},
      {"boundary_runs", e.boundary_runs}};
  return dump(j, indent);
}

std::string to_json(const ConeEstimate& e, int indent) {
  J j{{"survivors", e.survivors},
      {"positive", freq(e.positive)},
      {"quantile", e.quantile},
      {"alpha_hat", e.alpha_hat}};
  return dump(j, indent);
}

std::string to_json(const ConvergenceReport& r, int indent) {
  J j{{"window_sites", r.window_sites},
      {"t", r.t},
      {"n_runs", r.n_runs},
      {"n_reference", r.n_reference},
      {"weights", {{"ones", r.w1}, {"twos_only", r.w2}, {"none", r.w0}}},
      {"empirical", r.empirical},
      {"mu1", r.mu1},
      {"mu2", r.mu2},
      {"mixture", r.mixture},
      {"tv", r.tv}};
  return dump(j, indent);
}

std::string to_json(const BoundFit& f, int indent) {
  J pts = J::array();
  for (const auto& p : f.points) pts.push_back({{"x", p.x}, {"k", p.k}, {"n", p.n}});
  J j{{"bound", to_string(f.which)},
      {"points", pts},
      {"intercept", f.fit.intercept},
      {"slope", f.fit.slope},
      {"slope_se", f.fit.slope_se},
      {"expected_sign", f.expect_negative ? "negative" : "positive"},
      {"p_value", f.p_value},
      {"sign_ok", f.sign_ok}};
  return dump(j, indent);
}

std::string to_json(const AuditReport& r, int indent) {
  J items = J::array();
  for (const auto& i : r.items)
    items.push_back({{"name", i.name},
                     {"exact", i.exact},
                     {"checks", i.checks},
                     {"violations", i.violations},
                     {"pass", i.pass},
                     {"detail", i.detail}});
  J j{{"pass", r.pass()}, {"exact_violations", r.exact_violations()}, {"items", items}};
  return dump(j, indent);
}

std::string to_json(const DriftResult& r, int indent) {
  J j{{"L", r.L},       {"runs", r.runs},   {"surviving", r.surviving}, {"found", r.found},
      {"mean", mean(r.mean)}, {"pass", r.pass}, {"note", r.note}};
  return dump(j, indent);
}

std::string to_json(const LScan& s, int indent) {
  J pts = J::array();
  for (const auto& p : s.points)
    pts.push_back({{"L", p.L}, {"conditioned", p.conditioned}, {"found", p.found}, {"mean", mean(p.mean)}});
  J j{{"points", pts}, {"chosen", s.chosen ? J(*s.chosen) : J(nullptr)}};
  return dump(j, indent);
}

}  // namespace mtcp::est
