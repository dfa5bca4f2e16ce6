#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdpsynth/approx_lp.hpp"
#include "mdpsynth/discount.hpp"
#include "mdpsynth/epsilon_synthesis.hpp"
#include "mdpsynth/exact_milp.hpp"
#include "mdpsynth/existence.hpp"
#include "mdpsynth/gridworld.hpp"
#include "mdpsynth/mdp_io.hpp"
#include "mdpsynth/oracle.hpp"
#include "mdpsynth/reachability.hpp"
#include "mdpsynth/report.hpp"
#include "mdpsynth/simulate.hpp"

namespace py = pybind11;
using namespace mdpsynth;

namespace {

StationaryPolicy policy_from_rows(const Mdp& mdp,
                                  const std::vector<std::vector<double>>& rows) {
  StationaryPolicy policy;
  policy.prob = rows;
  require_policy_shape(mdp, policy);
  return policy;
}

py::dict report_dict(const Mdp& mdp, const SynthesisReport& report) {
  py::dict out;
  out["method"] = report.method;
  out["reach"] = report.reach;
  out["cost"] = report.cost;
  if (report.surrogate_cost) out["surrogate_cost"] = *report.surrogate_cost;
  if (report.infimum) out["infimum"] = *report.infimum;
  out["bounds"] = report.bounds;
  out["policy"] = report.policy.prob;
  out["wall_ms"] = report.wall_ms;
  out["diagnostics"] = report.diagnostics;
  out["json"] = report_to_json(mdp, report);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "policy synthesis for reachability MDPs with discounted costs";

  py::class_<Mdp>(m, "Mdp")
      .def_readonly("state_names", &Mdp::state_names)
      .def_readonly("initial", &Mdp::initial)
      .def_readonly("targets", &Mdp::targets)
      .def_readonly("discount", &Mdp::discount)
      .def_property_readonly("num_states", &Mdp::num_states)
      .def("num_actions", &Mdp::num_actions)
      .def("action_names",
           [](const Mdp& mdp, int s) {
             std::vector<std::string> names;
             for (const auto& act : mdp.actions[s]) names.push_back(act.name);
             return names;
           })
      .def("__repr__", [](const Mdp& mdp) {
        return "<Mdp states=" + std::to_string(mdp.num_states()) +
               " pairs=" + std::to_string(mdp.num_pairs()) + ">";
      });

  m.def("parse_mdp", [](const std::string& text) {
    return mdp_from_document(parse_mdp_document(text));
  });
  m.def("serialize_mdp", [](const Mdp& mdp) {
    return serialize_mdp_document(document_from_mdp(mdp));
  });
  m.def("load_mdp_file", &load_mdp_file);

  m.def("validate", [](const Mdp& mdp) {
    std::vector<std::string> issues;
    for (const ValidationIssue& issue : validate(mdp))
      issues.push_back(issue.rule + ": " + issue.message);
    return issues;
  });

  m.def("max_reach", [](const Mdp& mdp) {
    const ReachAnalysis ra = max_reach(mdp);
    py::dict out;
    out["x"] = ra.x;
    out["amax"] = ra.amax;
    out["rest"] = ra.partition.rest;
    out["zero"] = ra.partition.zero;
    out["tmin"] = ra.partition.tmin;
    return out;
  });

  m.def("reach_prob", [](const Mdp& mdp, const std::vector<std::vector<double>>& rows) {
    return reach_prob(mdp, policy_from_rows(mdp, rows));
  });
  m.def("evaluate_cost", [](const Mdp& mdp, const std::vector<std::vector<double>>& rows) {
    return evaluate_cost(mdp, policy_from_rows(mdp, rows));
  });
  m.def("optimal_values", [](const Mdp& mdp) {
    const DiscountAnalysis da = optimal_values(mdp);
    py::dict out;
    out["y"] = da.y;
    out["aopt"] = da.aopt;
    return out;
  });

  m.def(
      "synth_eps_optimal",
      [](const Mdp& mdp, double eps) {
        return report_dict(mdp, synth_eps_optimal(mdp, eps));
      },
      py::arg("mdp"), py::arg("eps"));

  m.def("check_existence", [](const Mdp& mdp) {
    const ExistenceCertificate cert = check_existence(mdp);
    py::dict out;
    out["exists"] = cert.exists;
    out["infimum"] = cert.infimum;
    out["x_initial"] = cert.x_initial;
    out["xbar_initial"] = cert.xbar_initial;
    if (cert.witness) out["witness"] = cert.witness->prob;
    out["diagnostics"] = cert.diagnostics;
    return out;
  });

  m.def(
      "solve_exact",
      [](const Mdp& mdp, double k, double time_limit_sec) {
        return report_dict(mdp, solve_exact(mdp, k, time_limit_sec));
      },
      py::arg("mdp"), py::arg("k") = 100.0,
      py::arg("time_limit_sec") = std::numeric_limits<double>::infinity());

  m.def(
      "synth_approx",
      [](const Mdp& mdp, double k, bool zero_terminal_costs) {
        return report_dict(mdp, synth_approx(mdp, k, zero_terminal_costs));
      },
      py::arg("mdp"), py::arg("k") = 100.0,
      py::arg("zero_terminal_costs") = false);

  m.def(
      "synth_total_cost",
      [](const Mdp& mdp, bool zero_terminal_costs) {
        return report_dict(mdp, synth_total_cost(mdp, zero_terminal_costs));
      },
      py::arg("mdp"), py::arg("zero_terminal_costs") = false);

  m.def("synth_discounted_baseline", [](const Mdp& mdp) {
    return report_dict(mdp, synth_discounted_baseline(mdp));
  });

  m.def(
      "simulate",
      [](const Mdp& mdp, const std::vector<std::vector<double>>& rows,
         long episodes, int horizon, std::uint64_t seed) {
        SimulationOptions options;
        options.episodes = episodes;
        options.horizon = horizon;
        options.seed = seed;
        const SimulationResult res =
            simulate(mdp, policy_from_rows(mdp, rows), options);
        py::dict out;
        out["reach"] = res.reach_estimate;
        out["reach_stderr"] = res.reach_stderr;
        out["cost"] = res.cost_estimate;
        out["cost_stderr"] = res.cost_stderr;
        out["tail_bound"] = res.tail_bound;
        out["episodes"] = res.episodes;
        out["horizon"] = res.horizon;
        return out;
      },
      py::arg("mdp"), py::arg("policy"), py::arg("episodes") = 10000,
      py::arg("horizon") = 1000, py::arg("seed") = 0);

  m.def(
      "brute_force_oracle",
      [](const Mdp& mdp, std::size_t max_policies) {
        const OracleResult res = brute_force_oracle(mdp, max_policies);
        py::dict out;
        out["x_initial"] = res.x_initial;
        out["best_cost"] = res.best_cost;
        out["best_choice"] = res.best_choice;
        return out;
      },
      py::arg("mdp"), py::arg("max_policies") = std::size_t{1000000});

  m.def("grid_mdp", [](const std::string& layout) {
    return generate_grid(parse_grid_layout(layout));
  });
}
