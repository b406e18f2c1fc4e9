#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "splitlangevin/analysis.hpp"
#include "splitlangevin/detflow.hpp"
#include "splitlangevin/error.hpp"
#include "splitlangevin/experiments.hpp"
#include "splitlangevin/model.hpp"
#include "splitlangevin/montecarlo.hpp"
#include "splitlangevin/splitting.hpp"
#include "splitlangevin/stochflow.hpp"

namespace py = pybind11;
using namespace splitlangevin;

namespace {

SchemeSpec to_scheme(const std::string& name) { return parse_scheme(name); }

unsigned resolve_workers(unsigned workers) { return workers == 0 ? default_workers() : workers; }

ConvergenceSetup make_setup(const std::string& scheme, double upsilon, double sigma,
                            const State& initial, double T, std::vector<double> taus,
                            double reference_tau, std::size_t n_paths, std::uint64_t seed,
                            unsigned workers) {
  return {to_scheme(scheme), PhysParams(upsilon, sigma), initial, T, std::move(taus),
          reference_tau, n_paths, SeedPolicy{seed}, resolve_workers(workers)};
}

py::dict fit_to_dict(const OrderFit& fit) {
  py::list levels;
  for (const auto& l : fit.levels) {
    levels.append(py::dict(py::arg("tau") = l.tau, py::arg("error") = l.error,
                           py::arg("std_error") = l.std_error));
  }
  return py::dict(py::arg("levels") = levels, py::arg("slope") = fit.slope,
                  py::arg("intercept") = fit.intercept, py::arg("r_squared") = fit.r_squared);
}

py::array_t<double> states_array(const std::vector<State>& states) {
  py::array_t<double> out({static_cast<py::ssize_t>(states.size()), py::ssize_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < states.size(); ++i) {
    v(i, 0) = states[i].p;
    v(i, 1) = states[i].q;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Energy-conserving splitting integrators for the stochastic Langevin equation";

  auto error = py::register_exception<Error>(m, "SplitLangevinError", PyExc_RuntimeError);
  (void)error;

  py::class_<State>(m, "State")
      .def(py::init<double, double>(), py::arg("p"), py::arg("q"))
      .def(py::init([](const py::tuple& t) {
        if (t.size() != 2) throw py::value_error("State needs (p, q)");
        return State{t[0].cast<double>(), t[1].cast<double>()};
      }))
      .def_readwrite("p", &State::p)
      .def_readwrite("q", &State::q)
      .def("__eq__", [](const State& a, const State& b) { return a == b; })
      .def("__iter__", [](const State& s) { return py::iter(py::make_tuple(s.p, s.q)); })
      .def("__repr__", [](const State& s) {
        return "State(p=" + std::to_string(s.p) + ", q=" + std::to_string(s.q) + ")";
      });
  py::implicitly_convertible<py::tuple, State>();

  py::class_<PhysParams>(m, "PhysParams")
      .def(py::init<double, double>(), py::arg("upsilon"), py::arg("sigma"))
      .def_property_readonly("upsilon", &PhysParams::upsilon)
      .def_property_readonly("sigma", &PhysParams::sigma);

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("rel_tol", &SolverSettings::rel_tol)
      .def_readwrite("abs_tol", &SolverSettings::abs_tol)
      .def_readwrite("max_iter", &SolverSettings::max_iter)
      .def_readwrite("fallback", &SolverSettings::fallback);

  m.def("energy_H0", [](const State& s) { return energy_H0(s); }, py::arg("state"));
  m.def("energy_H", &energy_H, py::arg("state"), py::arg("prm"));
  m.def("gibbs_log_density", &gibbs_log_density, py::arg("state"), py::arg("prm"));
  m.def(
      "energy_constants",
      [](const PhysParams& prm) {
        const auto c = energy_constants(prm);
        return py::dict(py::arg("c_H") = c.c_H, py::arg("c_e") = c.c_e);
      },
      py::arg("prm"));
  m.def(
      "gibbs_moments",
      [](const PhysParams& prm) {
        const auto g = gibbs_moments(prm);
        return py::dict(py::arg("Ep2") = g.Ep2, py::arg("Eq2") = g.Eq2, py::arg("Eq4") = g.Eq4);
      },
      py::arg("prm"));

  m.def(
      "conservative_step",
      [](const std::string& kind, const State& s, double tau, const PhysParams& prm,
         const SolverSettings& set) {
        return conservative_step(parse_map_kind(kind), s, tau, prm, set);
      },
      py::arg("kind"), py::arg("state"), py::arg("tau"), py::arg("prm"),
      py::arg("solver") = SolverSettings{});
  m.def(
      "energy_residual",
      [](const std::string& kind, const State& s, double tau, const PhysParams& prm) {
        return energy_residual(parse_map_kind(kind), s, tau, prm);
      },
      py::arg("kind"), py::arg("state"), py::arg("tau"), py::arg("prm"));
  m.def(
      "ou_substep",
      [](const State& s, double tau, const PhysParams& prm, double z) {
        return ou_substep_exact(s, tau, prm, z);
      },
      py::arg("state"), py::arg("tau"), py::arg("prm"), py::arg("z"));
  m.def(
      "scheme_step",
      [](const std::string& scheme, const State& s, double tau, const PhysParams& prm, double z) {
        return scheme_step(s, tau, prm, to_scheme(scheme), NormalDraw{z});
      },
      py::arg("scheme"), py::arg("state"), py::arg("tau"), py::arg("prm"), py::arg("z"));

  m.def(
      "simulate",
      [](const State& initial, double T, double tau, const PhysParams& prm,
         const std::string& scheme, std::uint64_t seed) {
        const Trajectory tr = simulate(initial, T, tau, prm, to_scheme(scheme), seed);
        py::array_t<double> times(static_cast<py::ssize_t>(tr.times.size()), tr.times.data());
        return py::make_tuple(times, states_array(tr.states));
      },
      py::arg("initial"), py::arg("T"), py::arg("tau"), py::arg("prm"),
      py::arg("scheme") = "SAVF", py::arg("seed") = 0,
      "Returns (times, states) with states of shape (N + 1, 2) in (p, q) order.");

  m.def(
      "fit_order",
      [](const std::vector<double>& taus, const std::vector<double>& errors) {
        if (taus.size() != errors.size()) {
          throw Error(ErrorCode::InvalidArgument, "taus and errors differ in length");
        }
        std::vector<std::pair<double, double>> levels;
        for (std::size_t i = 0; i < taus.size(); ++i) levels.emplace_back(taus[i], errors[i]);
        return fit_to_dict(fit_order(std::span<const std::pair<double, double>>(levels)));
      },
      py::arg("taus"), py::arg("errors"));

  m.def(
      "strong_error",
      [](const std::string& scheme, double upsilon, double sigma, const State& initial, double T,
         std::vector<double> taus, double reference_tau, std::size_t n_paths, std::uint64_t seed,
         unsigned workers) {
        const auto setup = make_setup(scheme, upsilon, sigma, initial, T, std::move(taus),
                                      reference_tau, n_paths, seed, workers);
        py::gil_scoped_release release;
        const OrderFit fit = strong_error(setup);
        py::gil_scoped_acquire acquire;
        return fit_to_dict(fit);
      },
      py::arg("scheme"), py::arg("upsilon"), py::arg("sigma"), py::arg("initial"), py::arg("T"),
      py::arg("taus"), py::arg("reference_tau"), py::arg("n_paths"), py::arg("seed") = 0,
      py::arg("workers") = 0);

  m.def(
      "weak_error",
      [](const std::string& scheme, double upsilon, double sigma, const State& initial, double T,
         std::vector<double> taus, double reference_tau, std::size_t n_paths,
         const std::string& observable, std::uint64_t seed, unsigned workers) {
        const auto setup = make_setup(scheme, upsilon, sigma, initial, T, std::move(taus),
                                      reference_tau, n_paths, seed, workers);
        const Observable g = named_observable(observable);
        py::gil_scoped_release release;
        const OrderFit fit = weak_error(setup, g);
        py::gil_scoped_acquire acquire;
        return fit_to_dict(fit);
      },
      py::arg("scheme"), py::arg("upsilon"), py::arg("sigma"), py::arg("initial"), py::arg("T"),
      py::arg("taus"), py::arg("reference_tau"), py::arg("n_paths"),
      py::arg("observable") = "sin_sin", py::arg("seed") = 0, py::arg("workers") = 0,
      "observable is one of sin_sin, sin_r, sin_1_r, p2, q2, q4.");

  m.def(
      "lyapunov_check",
      [](const std::string& scheme, const PhysParams& prm, double tau,
         const std::vector<State>& states, std::size_t n_draws, std::uint64_t seed,
         unsigned workers) {
        std::vector<LyapunovResult> res;
        {
          py::gil_scoped_release release;
          res = lyapunov_check(to_scheme(scheme), prm, tau, states, n_draws, SeedPolicy{seed},
                               resolve_workers(workers));
        }
        py::list out;
        for (const auto& r : res) {
          out.append(py::dict(py::arg("state") = r.state, py::arg("mean") = r.mean,
                              py::arg("std_error") = r.std_error, py::arg("bound") = r.bound,
                              py::arg("margin") = r.margin, py::arg("pass") = r.pass));
        }
        return out;
      },
      py::arg("scheme"), py::arg("prm"), py::arg("tau"), py::arg("states"), py::arg("n_draws"),
      py::arg("seed") = 0, py::arg("workers") = 0);

  m.def(
      "phase_area",
      [](const std::string& scheme, const PhysParams& prm, double tau, double T,
         std::size_t n_vertices, std::uint64_t seed, std::size_t record_every) {
        std::vector<AreaPoint> pts;
        {
          py::gil_scoped_release release;
          pts = phase_area(to_scheme(scheme), prm, tau, T, n_vertices, seed, record_every);
        }
        std::vector<double> t;
        std::vector<double> a;
        for (const auto& p : pts) {
          t.push_back(p.t);
          a.push_back(p.area);
        }
        return py::make_tuple(t, a);
      },
      py::arg("scheme"), py::arg("prm"), py::arg("tau"), py::arg("T"), py::arg("n_vertices"),
      py::arg("seed") = 0, py::arg("record_every") = 1);

  m.def(
      "jacobian_det",
      [](const std::string& scheme, const State& s, double tau, const PhysParams& prm, double z) {
        const SchemeSpec spec = to_scheme(scheme);
        return jacobian_det(
            [&](const State& x) { return scheme_step(x, tau, prm, spec, NormalDraw{z}); }, s);
      },
      py::arg("scheme"), py::arg("state"), py::arg("tau"), py::arg("prm"), py::arg("z"));

  m.def(
      "distribution_distance",
      [](const std::vector<State>& states, const PhysParams& prm, std::size_t bins) {
        HistogramRange range;
        range.n_p = bins;
        range.n_q = bins;
        return distribution_distance(empirical_distribution(states, range), prm);
      },
      py::arg("states"), py::arg("prm"), py::arg("bins") = 40);

  m.def("experiment_names", &experiment_names);
  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& config) {
        RunConfig cfg;
        for (const auto& [k, v] : config) cfg.set(k, v);
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg);
        }
        py::list checks;
        for (const auto& c : s.checks) {
          checks.append(py::dict(py::arg("name") = c.name, py::arg("pass") = c.pass,
                                 py::arg("margin") = c.margin));
        }
        return py::dict(py::arg("experiment") = s.experiment, py::arg("metrics") = s.metrics,
                        py::arg("checks") = checks, py::arg("files") = s.files);
      },
      py::arg("config"));
}
