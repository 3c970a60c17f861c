#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "mtcp/ancestor.hpp"
#include "mtcp/estimators.hpp"
#include "mtcp/paths.hpp"
#include "mtcp/process.hpp"
#include "mtcp/walk.hpp"

namespace py = pybind11;
using namespace mtcp;

namespace {

PathMode mode_of(const std::string& s) {
  if (s == "bip") return PathMode::bip;
  if (s == "sip") return PathMode::sip;
  throw std::invalid_argument("mode must be 'bip' or 'sip'");
}

EventKind kind_of(const std::string& s) {
  if (s == "death") return EventKind::death;
  if (s == "arrow") return EventKind::arrow;
  if (s == "selective") return EventKind::selective;
  throw std::invalid_argument("kind must be 'death', 'arrow' or 'selective'");
}

py::dict class_dict(const PathClass& c) {
  py::dict d;
  d["bip"] = c.is_bip;
  d["sip"] = c.is_sip;
  d["fbip"] = c.is_fbip;
  d["fsip"] = c.is_fsip;
  d["rfbip"] = c.is_rfbip;
  d["rfsip"] = c.is_rfsip;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multitype contact process: graphical construction, paths, ancestors, walks";

  py::class_<LatticeWindow>(m, "LatticeWindow")
      .def(py::init<int, int, int, Time>(), py::arg("dim"), py::arg("radius"), py::arg("range"),
           py::arg("horizon"))
      .def_property_readonly("dim", &LatticeWindow::dim)
      .def_property_readonly("radius", &LatticeWindow::radius)
      .def_property_readonly("range", &LatticeWindow::range)
      .def_property_readonly("horizon", &LatticeWindow::horizon)
      .def_property_readonly("num_sites", &LatticeWindow::num_sites)
      .def_property_readonly("num_edges", &LatticeWindow::num_edges)
      .def("index", [](const LatticeWindow& w, const Coord& x) { return w.index(x); })
      .def("coord", &LatticeWindow::coord_vec)
      .def("find", [](const LatticeWindow& w, const Coord& x) { return w.find(x); });

  py::class_<AugmentedHarrisSystem>(m, "HarrisSystem")
      .def_property_readonly("window", &AugmentedHarrisSystem::window)
      .def_property_readonly("seed", &AugmentedHarrisSystem::seed)
      .def("count", [](const AugmentedHarrisSystem& h, const std::string& k) { return h.count(kind_of(k)); })
      .def("deaths",
           [](const AugmentedHarrisSystem& h, SiteIndex s) {
             auto d = h.deaths(s);
             return std::vector<Time>(d.begin(), d.end());
           })
      .def("events",
           [](const AugmentedHarrisSystem& h) {
             py::list out;
             for (const Event& e : h.events()) out.append(py::make_tuple(e.time, to_string(e.kind), e.index));
             return out;
           })
      .def("to_json", [](const AugmentedHarrisSystem& h) { return to_json(h); })
      .def_static("from_json", [](const std::string& s) { return harris_from_json(s); });

  m.def(
      "sample_harris",
      [](const LatticeWindow& w, double lambda1, double lambda2, std::uint64_t seed, bool allow_equal_rates) {
        return sample_harris(w, {lambda1, lambda2}, seed, SampleOptions{.allow_equal_rates = allow_equal_rates});
      },
      py::arg("window"), py::arg("lambda1"), py::arg("lambda2"), py::arg("seed"),
      py::arg("allow_equal_rates") = false);
  m.def("reverse", &reverse, py::arg("system"), py::arg("u"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("end_time", &Trajectory::end_time)
      .def_property_readonly("boundary_contact", &Trajectory::boundary_contact)
      .def("final",
           [](const Trajectory& t) {
             auto s = t.final_configuration().states();
             return std::vector<int>(s.begin(), s.end());
           })
      .def("log",
           [](const Trajectory& t) {
             py::list out;
             for (const Transition& r : t.log())
               out.append(py::make_tuple(r.time, r.site, static_cast<int>(r.old_state), static_cast<int>(r.new_state)));
             return out;
           })
      .def(
          "state_at",
          [](const Trajectory& t, SiteIndex x, Time s, bool before) { return static_cast<int>(t.state_at(x, s, before)); },
          py::arg("site"), py::arg("t"), py::arg("before") = false);

  m.def(
      "evolve",
      [](const AugmentedHarrisSystem& h, const std::vector<int>& states, Time t) {
        std::vector<State> st;
        for (int v : states) {
          if (v < 0 || v > 2) throw std::invalid_argument("states must be 0, 1 or 2");
          st.push_back(static_cast<State>(v));
        }
        return evolve(Configuration(h.window(), std::move(st)), h, t);
      },
      py::arg("system"), py::arg("initial"), py::arg("t"));

  py::class_<InfectionPath>(m, "InfectionPath")
      .def(py::init([](Time t1, Time t2, SiteIndex start, const std::vector<std::tuple<Time, SiteIndex, SiteIndex>>& j) {
             InfectionPath p{.t1 = t1, .t2 = t2, .start = start, .jumps = {}};
             for (auto [t, a, b] : j) p.jumps.push_back({t, a, b});
             return p;
           }),
           py::arg("t1"), py::arg("t2"), py::arg("start"), py::arg("jumps") = std::vector<std::tuple<Time, SiteIndex, SiteIndex>>{})
      .def_readonly("t1", &InfectionPath::t1)
      .def_readonly("t2", &InfectionPath::t2)
      .def_readonly("start", &InfectionPath::start)
      .def_property_readonly("end", &InfectionPath::end)
      .def_property_readonly("jumps",
                             [](const InfectionPath& p) {
                               py::list out;
                               for (const Jump& j : p.jumps) out.append(py::make_tuple(j.time, j.from, j.to));
                               return out;
                             })
      .def("__eq__", [](const InfectionPath& a, const InfectionPath& b) { return a == b; });

  m.def(
      "classify",
      [](const AugmentedHarrisSystem& h, const InfectionPath& p, Time epoch, std::optional<Time> top) {
        return class_dict(classify(h, p, epoch, top.value_or(p.t2)));
      },
      py::arg("system"), py::arg("path"), py::arg("epoch"), py::arg("top") = py::none());
  m.def(
      "enumerate_paths",
      [](const AugmentedHarrisSystem& h, const std::vector<SiteIndex>& sources, Time s,
         const std::vector<SiteIndex>& targets, Time t, const std::string& mode, std::size_t cap) {
        return enumerate_paths(h, sources, s, targets, t, mode_of(mode), cap);
      },
      py::arg("system"), py::arg("sources"), py::arg("s"), py::arg("targets"), py::arg("t"), py::arg("mode") = "bip",
      py::arg("cap") = kDefaultEventCap);
  m.def(
      "find_fbip", [](const AugmentedHarrisSystem& h, Time s, SiteIndex x, Time t) { return find_fbip(h, s, x, t); },
      py::arg("system"), py::arg("s"), py::arg("x"), py::arg("t"));
  m.def(
      "find_rfbip",
      [](const AugmentedHarrisSystem& h, SiteIndex x, Time t1, Time t2) { return find_rfbip(h, x, t1, t2); },
      py::arg("system"), py::arg("x"), py::arg("t1"), py::arg("t2"));
  m.def("ancestor_at", &ancestor_at, py::arg("system"), py::arg("x"), py::arg("s"), py::arg("t"));

  m.def(
      "simulate_walk",
      [](const std::vector<std::pair<int, double>>& x, const std::vector<std::pair<double, double>>& tau, int x0,
         double t0, std::size_t n, std::uint64_t seed) {
        return to_json(walk::simulate_walk(walk::StepDistribution(x, tau), x0, t0, n, seed));
      },
      py::arg("x"), py::arg("tau"), py::arg("x0"), py::arg("t0"), py::arg("n_steps"), py::arg("seed"));
  m.def(
      "cone_experiment",
      [](const std::vector<std::pair<int, double>>& x, const std::vector<std::pair<double, double>>& tau, double beta,
         double ell, double t, std::size_t n, int x0, std::uint64_t seed) {
        auto r = walk::cone_experiment(walk::StepDistribution(x, tau), beta, ell, t, n, x0, seed, 1);
        return py::make_tuple(r.box.hits, r.box.n);
      },
      py::arg("x"), py::arg("tau"), py::arg("beta"), py::arg("ell"), py::arg("t"), py::arg("n_runs"), py::arg("x0"),
      py::arg("seed"));

  m.def(
      "run_command",
      [](const std::string& name, const std::string& config, const std::string& out_dir, int threads) {
        auto cfg = cli::resolve_config(cli::parse_config_text(config), {});
        return cli::run_command(name, cfg, out_dir, threads).dump();
      },
      py::arg("subcommand"), py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);

  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);
}
