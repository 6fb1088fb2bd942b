// Python bindings for the ballast core: processes, simulation, potentials,
// graphs and the exact cross-check toolkit.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ballast/analysis.hpp"
#include "ballast/common.hpp"
#include "ballast/experiment.hpp"
#include "ballast/graphs.hpp"
#include "ballast/potentials.hpp"
#include "ballast/processes.hpp"
#include "ballast/rng.hpp"

namespace py = pybind11;

namespace {

/// Thin value wrapper so the process variant is a single Python type.
struct PyProcess {
  ballast::ProcessSpec spec;
};

py::object to_fraction(const ballast::rational& r) {
  std::ostringstream out;
  out << r;
  return py::module_::import("fractions").attr("Fraction")(py::str(out.str()));
}

py::list to_fraction_list(const std::vector<ballast::rational>& v) {
  py::list out;
  for (const auto& r : v) out.append(to_fraction(r));
  return out;
}

ballast::rational rational_from_py(const py::object& o) {
  const py::object frac = py::module_::import("fractions").attr("Fraction")(o);
  const std::string s = py::cast<std::string>(py::str(frac));
  return ballast::rational(s);
}

ballast::LogBase base_from(const std::string& s) { return ballast::log_base_from_string(s); }

std::vector<ballast::PotentialSpec> potentials_from(const std::vector<std::string>& labels,
                                                    std::uint32_t k, const std::string& base) {
  std::vector<ballast::PotentialSpec> specs;
  specs.reserve(labels.size());
  for (const auto& label : labels) {
    specs.push_back(ballast::parse_potential(label, k, base_from(base)));
  }
  return specs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ballast: balanced allocations with binary queries — core bindings";
  m.attr("__version__") = ballast::kVersion;
  m.attr("ALPHA1") = ballast::kAlpha1;
  m.attr("ALPHA2") = ballast::kAlpha2;

  // -- RNG ------------------------------------------------------------------
  py::class_<ballast::SplitMix64>(m, "SplitMix64")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &ballast::SplitMix64::next);

  py::class_<ballast::Xoshiro256StarStar>(m, "Xoshiro256StarStar")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &ballast::Xoshiro256StarStar::next)
      .def("bounded", &ballast::Xoshiro256StarStar::bounded, py::arg("bound"))
      .def("uniform01", &ballast::Xoshiro256StarStar::uniform01)
      .def("coin", &ballast::Xoshiro256StarStar::coin);

  m.def("rep_seed", &ballast::rep_seed, py::arg("base_seed"), py::arg("rep"),
        "Derived per-repetition seed: SplitMix64(base_seed ^ rep).next()");

  // -- Load state -----------------------------------------------------------
  py::class_<ballast::LoadState>(m, "LoadState")
      .def(py::init<std::uint32_t>(), py::arg("n"))
      .def_static("from_loads", &ballast::LoadState::from_loads, py::arg("loads"))
      .def("increment", &ballast::LoadState::increment, py::arg("bin"))
      .def_property_readonly("n", &ballast::LoadState::n)
      .def_property_readonly("total", &ballast::LoadState::total)
      .def("load", &ballast::LoadState::load, py::arg("bin"))
      .def("bin_at_rank", &ballast::LoadState::bin_at_rank, py::arg("rank"))
      .def("rank_of", &ballast::LoadState::rank_of, py::arg("bin"))
      .def("loads", &ballast::LoadState::loads)
      .def("quantile_value", &ballast::LoadState::quantile_value, py::arg("count"))
      .def("gap", &ballast::LoadState::gap)
      .def("check_invariants", &ballast::LoadState::check_invariants)
      .def_static("tier", &ballast::LoadState::tier, py::arg("rank1"), py::arg("cut_counts"))
      .def_static("tier_threshold", &ballast::LoadState::tier_threshold, py::arg("load"),
                  py::arg("thresholds"));

  // -- Graphs ---------------------------------------------------------------
  py::class_<ballast::RegularGraph, std::shared_ptr<ballast::RegularGraph>>(m, "RegularGraph")
      .def_readonly("n", &ballast::RegularGraph::n)
      .def_readonly("d", &ballast::RegularGraph::d)
      .def_readonly("edges", &ballast::RegularGraph::edges)
      .def_readonly("adjacency", &ballast::RegularGraph::adjacency)
      .def_property_readonly(
          "cached_lambda",
          [](const ballast::RegularGraph& g) -> py::object {
            return g.lambda ? py::cast(*g.lambda) : py::none();
          })
      .def("__repr__", [](const ballast::RegularGraph& g) {
        std::ostringstream out;
        out << "RegularGraph(n=" << g.n << ", d=" << g.d << ", edges=" << g.edges.size() << ")";
        return out.str();
      });

  m.def("make_complete", &ballast::make_complete, py::arg("n"));
  m.def("make_cycle", &ballast::make_cycle, py::arg("n"));
  m.def("make_hypercube", &ballast::make_hypercube, py::arg("dim"));
  m.def("make_random_regular", &ballast::make_random_regular, py::arg("n"), py::arg("d"),
        py::arg("seed"));
  m.def("load_graph", &ballast::load_graph, py::arg("path"));
  m.def("save_graph", &ballast::save_graph, py::arg("graph"), py::arg("path"));
  m.def("is_connected", &ballast::is_connected, py::arg("graph"));
  m.def("spectral_expansion", &ballast::spectral_expansion, py::arg("graph"));
  m.def("spectral_expansion_dense", &ballast::spectral_expansion_dense, py::arg("graph"));
  m.def("spectral_expansion_power", &ballast::spectral_expansion_power, py::arg("graph"));

  py::class_<ballast::MixingResult>(m, "MixingResult")
      .def_readonly("e_xy", &ballast::MixingResult::e_xy)
      .def_readonly("expected", &ballast::MixingResult::expected)
      .def_readonly("bound", &ballast::MixingResult::bound)
      .def_readonly("deviation", &ballast::MixingResult::deviation)
      .def_readonly("holds", &ballast::MixingResult::holds);
  m.def("mixing_check", &ballast::mixing_check, py::arg("graph"), py::arg("x"), py::arg("y"),
        py::arg("lam"));

  py::class_<ballast::PrefixBoundReport>(m, "PrefixBoundReport")
      .def_readonly("lam", &ballast::PrefixBoundReport::lambda)
      .def_readonly("holds_small", &ballast::PrefixBoundReport::holds_small)
      .def_readonly("holds_large", &ballast::PrefixBoundReport::holds_large)
      .def_readonly("holds_general", &ballast::PrefixBoundReport::holds_general)
      .def_readonly("worst_slack_small", &ballast::PrefixBoundReport::worst_slack_small)
      .def_readonly("worst_slack_large", &ballast::PrefixBoundReport::worst_slack_large)
      .def_readonly("worst_slack_general", &ballast::PrefixBoundReport::worst_slack_general)
      .def("all_hold", &ballast::PrefixBoundReport::all_hold);
  m.def(
      "expansion_prefix_bounds_check",
      [](const ballast::RegularGraph& g, const ballast::LoadState& state,
         std::optional<double> lambda_hint) {
        return ballast::expansion_prefix_bounds_check(g, state, lambda_hint);
      },
      py::arg("graph"), py::arg("state"), py::arg("lambda_hint") = py::none());

  py::class_<ballast::ExpansionPrecondition>(m, "ExpansionPrecondition")
      .def_readonly("lam", &ballast::ExpansionPrecondition::lambda)
      .def_readonly("lambda_tilde", &ballast::ExpansionPrecondition::lambda_tilde)
      .def_readonly("delta1", &ballast::ExpansionPrecondition::delta1)
      .def_readonly("holds", &ballast::ExpansionPrecondition::holds);
  m.def("expander_quantile_precondition", &ballast::expander_quantile_precondition, py::arg("n"),
        py::arg("k"), py::arg("lam"));

  m.def(
      "graphical_vector",
      [](const ballast::RegularGraph& g, const ballast::LoadState& s) {
        return ballast::graphical_vector(g, s);
      },
      py::arg("graph"), py::arg("state"));
  m.def(
      "graphical_vector_exact",
      [](const ballast::RegularGraph& g, const ballast::LoadState& s) {
        return to_fraction_list(ballast::graphical_vector_exact(g, s));
      },
      py::arg("graph"), py::arg("state"));

  // -- Processes ------------------------------------------------------------
  py::class_<PyProcess>(m, "Process")
      .def("__repr__",
           [](const PyProcess& p) { return "Process(" + ballast::describe(p.spec) + ")"; })
      .def_property_readonly("name", [](const PyProcess& p) { return ballast::describe(p.spec); });

  m.def("one_choice", [] { return PyProcess{ballast::OneChoice{}}; });
  m.def("two_choice", [] { return PyProcess{ballast::DChoice{2}}; });
  m.def(
      "d_choice", [](std::uint32_t d) { return PyProcess{ballast::DChoice{d}}; }, py::arg("d"));
  m.def(
      "one_plus_beta", [](double beta) { return PyProcess{ballast::OnePlusBeta{beta}}; },
      py::arg("beta"));
  m.def(
      "quantile",
      [](const std::vector<std::uint32_t>& cuts) { return PyProcess{ballast::Quantile{cuts}}; },
      py::arg("cuts"), "Quantile process with cut counts c_1 < ... < c_k");
  m.def(
      "threshold",
      [](const std::vector<std::int64_t>& values, bool relative) {
        return PyProcess{ballast::Threshold{values, relative}};
      },
      py::arg("values"), py::arg("relative_to_average") = false);
  m.def(
      "thinning",
      [](const std::vector<std::uint32_t>& cuts) { return PyProcess{ballast::Thinning{cuts}}; },
      py::arg("accept_cuts"));
  m.def(
      "graphical",
      [](const std::shared_ptr<ballast::RegularGraph>& g) {
        return PyProcess{ballast::Graphical{g}};
      },
      py::arg("graph"));

  m.def(
      "validate", [](const PyProcess& p, std::uint32_t n) { ballast::validate(p.spec, n); },
      py::arg("process"), py::arg("n"));
  m.def(
      "describe", [](const PyProcess& p) { return ballast::describe(p.spec); },
      py::arg("process"));
  m.def("is_process_name", &ballast::is_process_name, py::arg("name"));

  m.def(
      "make_uniform_quantiles",
      [](std::uint32_t n, std::uint32_t k, const std::string& base, double scale) {
        return ballast::make_uniform_quantiles(n, k, base_from(base), scale);
      },
      py::arg("n"), py::arg("k"), py::arg("base") = "e", py::arg("scale") = 0.5);

  m.def(
      "analytic_vector",
      [](const PyProcess& p, std::uint32_t n, const ballast::LoadState* state) {
        return ballast::analytic_vector(p.spec, n, state);
      },
      py::arg("process"), py::arg("n"), py::arg("state") = nullptr);
  m.def(
      "analytic_vector_exact",
      [](const PyProcess& p, std::uint32_t n, const ballast::LoadState* state) {
        return to_fraction_list(ballast::analytic_vector_exact(p.spec, n, state));
      },
      py::arg("process"), py::arg("n"), py::arg("state") = nullptr);

  m.def(
      "step",
      [](const PyProcess& p, const ballast::LoadState& s, ballast::Xoshiro256StarStar& rng) {
        return ballast::step(p.spec, s, rng);
      },
      py::arg("process"), py::arg("state"), py::arg("rng"));

  // -- Simulation -----------------------------------------------------------
  py::class_<ballast::RunResult>(m, "RunResult")
      .def_readonly("n", &ballast::RunResult::n)
      .def_readonly("m", &ballast::RunResult::m)
      .def_readonly("seed", &ballast::RunResult::seed)
      .def_readonly("config_echo", &ballast::RunResult::config_echo)
      .def_readonly("final_gap", &ballast::RunResult::final_gap)
      .def_readonly("max_load", &ballast::RunResult::max_load)
      .def_readonly("checkpoint_times", &ballast::RunResult::checkpoint_times)
      .def_readonly("gap_series", &ballast::RunResult::gap_series)
      .def_readonly("observable_series", &ballast::RunResult::observable_series)
      .def_readonly("final_state", &ballast::RunResult::final_state);

  m.def(
      "run",
      [](const PyProcess& p, std::uint32_t n, std::uint64_t m_balls, std::uint64_t seed,
         std::uint64_t checkpoint_every, const std::vector<std::string>& potentials,
         std::uint32_t k, const std::string& base) {
        const auto specs = potentials_from(potentials, k, base);
        std::vector<ballast::Observer> observers;
        observers.reserve(specs.size());
        for (const auto& spec : specs) {
          observers.push_back(
              [spec](const ballast::LoadState& s) { return ballast::evaluate(spec, s); });
        }
        py::gil_scoped_release release;
        return ballast::run(p.spec, n, m_balls, seed, checkpoint_every, observers);
      },
      py::arg("process"), py::arg("n"), py::arg("m"), py::arg("seed"),
      py::arg("checkpoint_every") = 0, py::arg("potentials") = std::vector<std::string>{},
      py::arg("k") = 1, py::arg("base") = "e");

  py::class_<ballast::GapDistribution>(m, "GapDistribution")
      .def_readonly("histogram", &ballast::GapDistribution::histogram)
      .def_readonly("mean", &ballast::GapDistribution::mean)
      .def_readonly("min", &ballast::GapDistribution::min)
      .def_readonly("max", &ballast::GapDistribution::max)
      .def_readonly("repetitions", &ballast::GapDistribution::repetitions)
      .def_readonly("config_echo", &ballast::GapDistribution::config_echo)
      .def_readonly("gaps", &ballast::GapDistribution::gaps);

  m.def(
      "gap_distribution",
      [](const PyProcess& p, std::uint32_t n, std::uint64_t m_balls, std::uint32_t reps,
         std::uint64_t seed, std::uint32_t threads) {
        py::gil_scoped_release release;
        return ballast::gap_distribution(p.spec, n, m_balls, reps, seed, threads);
      },
      py::arg("process"), py::arg("n"), py::arg("m"), py::arg("reps"), py::arg("seed"),
      py::arg("threads") = 1);

  m.def(
      "resolve_m",
      [](const std::string& rule, std::uint32_t n, std::uint64_t fixed_m) {
        return ballast::resolve_m(ballast::m_rule_from_string(rule), n, fixed_m);
      },
      py::arg("rule"), py::arg("n"), py::arg("fixed_m") = 0);
  m.def(
      "lower_bound_threshold",
      [](const std::string& regime, std::uint32_t n) {
        return ballast::lower_bound_threshold(ballast::m_rule_from_string(regime), n);
      },
      py::arg("regime"), py::arg("n"));

  // -- Potentials -----------------------------------------------------------
  m.def(
      "phi",
      [](const ballast::LoadState& s, std::uint32_t j, std::uint32_t k, double alpha,
         const std::string& base) { return ballast::phi(s, j, k, alpha, base_from(base)); },
      py::arg("state"), py::arg("j"), py::arg("k"), py::arg("alpha") = ballast::kAlpha2,
      py::arg("base") = "e");
  m.def(
      "psi",
      [](const ballast::LoadState& s, std::uint32_t j, std::uint32_t k, double alpha,
         const std::string& base) { return ballast::psi(s, j, k, alpha, base_from(base)); },
      py::arg("state"), py::arg("j"), py::arg("k"), py::arg("alpha") = ballast::kAlpha1,
      py::arg("base") = "e");
  m.def("gamma_potential", &ballast::gamma_potential, py::arg("state"), py::arg("alpha"));

  // -- Analysis -------------------------------------------------------------
  m.def("prefix_majorizes", &ballast::prefix_majorizes, py::arg("p"), py::arg("q"),
        py::arg("tol") = 1e-12);

  py::class_<ballast::CouplingReport>(m, "CouplingReport")
      .def_readonly("precondition_holds", &ballast::CouplingReport::precondition_holds)
      .def_readonly("holds", &ballast::CouplingReport::holds)
      .def_readonly("steps", &ballast::CouplingReport::steps)
      .def_readonly("violation_step", &ballast::CouplingReport::violation_step)
      .def_readonly("violation_prefix", &ballast::CouplingReport::violation_prefix)
      .def_readonly("max_slack", &ballast::CouplingReport::max_slack);
  m.def(
      "coupled_run",
      [](const PyProcess& a, const PyProcess& b, std::uint32_t n, std::uint64_t m_balls,
         std::uint64_t seed) {
        py::gil_scoped_release release;
        return ballast::coupled_run(a.spec, b.spec, n, m_balls, seed);
      },
      py::arg("a"), py::arg("b"), py::arg("n"), py::arg("m"), py::arg("seed"));

  m.def(
      "enum_vector",
      [](const PyProcess& p, const ballast::LoadState& s) {
        return to_fraction_list(ballast::enum_vector(p.spec, s));
      },
      py::arg("process"), py::arg("state"));

  py::class_<ballast::EmpiricalReport>(m, "EmpiricalReport")
      .def_readonly("frequencies", &ballast::EmpiricalReport::frequencies)
      .def_readonly("max_sigmas", &ballast::EmpiricalReport::max_sigmas)
      .def_readonly("worst_rank", &ballast::EmpiricalReport::worst_rank)
      .def_readonly("within_budget", &ballast::EmpiricalReport::within_budget);
  m.def(
      "empirical_vector",
      [](const PyProcess& p, const ballast::LoadState& s, std::uint64_t trials,
         std::uint64_t seed, double sigma_budget) {
        py::gil_scoped_release release;
        return ballast::empirical_vector(p.spec, s, trials, seed, sigma_budget);
      },
      py::arg("process"), py::arg("state"), py::arg("trials"), py::arg("seed"),
      py::arg("sigma_budget") = 4.0);

  py::class_<ballast::RelaxedEntrywiseReport>(m, "RelaxedEntrywiseReport")
      .def_readonly("tier_caps", &ballast::RelaxedEntrywiseReport::tier_caps)
      .def_readonly("non_decreasing", &ballast::RelaxedEntrywiseReport::non_decreasing)
      .def_readonly("light_separation", &ballast::RelaxedEntrywiseReport::light_separation)
      .def_readonly("heavy_separation", &ballast::RelaxedEntrywiseReport::heavy_separation)
      .def_readonly("worst_cap_excess", &ballast::RelaxedEntrywiseReport::worst_cap_excess)
      .def_readonly("worst_monotone_drop", &ballast::RelaxedEntrywiseReport::worst_monotone_drop)
      .def_readonly("member", &ballast::RelaxedEntrywiseReport::member);
  m.def("relaxed_quantile_entrywise", &ballast::relaxed_quantile_entrywise, py::arg("p"),
        py::arg("cuts"), py::arg("n"), py::arg("gamma"), py::arg("eps"));

  py::class_<ballast::RelaxedMajorizedReport>(m, "RelaxedMajorizedReport")
      .def_readonly("cap_prefixes", &ballast::RelaxedMajorizedReport::cap_prefixes)
      .def_readonly("light_prefix", &ballast::RelaxedMajorizedReport::light_prefix)
      .def_readonly("heavy_suffix", &ballast::RelaxedMajorizedReport::heavy_suffix)
      .def_readonly("worst_cap_excess", &ballast::RelaxedMajorizedReport::worst_cap_excess)
      .def_readonly("worst_light_excess", &ballast::RelaxedMajorizedReport::worst_light_excess)
      .def_readonly("worst_heavy_shortfall",
                    &ballast::RelaxedMajorizedReport::worst_heavy_shortfall)
      .def_readonly("member", &ballast::RelaxedMajorizedReport::member);
  m.def(
      "relaxed_quantile_majorized",
      [](const py::list& p, const std::vector<std::uint32_t>& cuts, std::uint32_t n,
         const py::object& gamma, const py::object& eps) {
        std::vector<ballast::rational> pv;
        pv.reserve(p.size());
        for (const auto& item : p) pv.push_back(rational_from_py(py::reinterpret_borrow<py::object>(item)));
        return ballast::relaxed_quantile_majorized(pv, cuts, n, rational_from_py(gamma),
                                                   rational_from_py(eps));
      },
      py::arg("p"), py::arg("cuts"), py::arg("n"), py::arg("gamma"), py::arg("eps"),
      "p entries and gamma/eps may be ints, floats, strings like '1/12', or Fractions");

  m.def("thinning_equivalence_check", &ballast::thinning_equivalence_check, py::arg("cut"),
        py::arg("n"));
  m.def(
      "threshold_equiv_quantile",
      [](const ballast::LoadState& s, std::int64_t f) {
        return to_fraction(ballast::threshold_equiv_quantile(s, f));
      },
      py::arg("state"), py::arg("f"));

  py::class_<ballast::MixtureDecomposition>(m, "MixtureDecomposition")
      .def_readonly("f_low", &ballast::MixtureDecomposition::f_low)
      .def_readonly("f_high", &ballast::MixtureDecomposition::f_high)
      .def_property_readonly(
          "alpha",
          [](const ballast::MixtureDecomposition& d) { return to_fraction(d.alpha); })
      .def_readonly("verified", &ballast::MixtureDecomposition::verified);
  m.def("quantile_threshold_mixture", &ballast::quantile_threshold_mixture, py::arg("state"),
        py::arg("cut"));

  py::class_<ballast::ChainMajorizationReport>(m, "ChainMajorizationReport")
      .def_readonly("schedule", &ballast::ChainMajorizationReport::schedule)
      .def_readonly("boundary_holds", &ballast::ChainMajorizationReport::boundary_holds)
      .def_readonly("full_holds", &ballast::ChainMajorizationReport::full_holds)
      .def_readonly("worst_boundary_slack",
                    &ballast::ChainMajorizationReport::worst_boundary_slack);
  m.def("thinning_chain_check", &ballast::thinning_chain_check, py::arg("cuts"), py::arg("n"));

  // -- Verification ---------------------------------------------------------
  py::class_<ballast::VerifyCheck>(m, "VerifyCheck")
      .def_readonly("name", &ballast::VerifyCheck::name)
      .def_readonly("passed", &ballast::VerifyCheck::pass)
      .def_readonly("detail", &ballast::VerifyCheck::detail);
  m.def(
      "run_verify",
      [](bool inject_fault) {
        py::gil_scoped_release release;
        return ballast::run_verify(inject_fault);
      },
      py::arg("inject_fault") = false);
}
