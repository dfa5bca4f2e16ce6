#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
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

namespace {

using namespace mdpsynth;

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

// Shared output plumbing for the synthesis subcommands.
struct ReportSinks {
  std::string out_json;
  std::string out_policy;
  std::string out_csv;

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", out_json, "write the full report as JSON");
    cmd->add_option("--policy", out_policy, "write the policy in text form");
    cmd->add_option("--csv", out_csv, "write the per-state table as CSV");
  }

  void deliver(const Mdp& mdp, const SynthesisReport& report) const {
    if (!out_json.empty()) write_text_file(out_json, report_to_json(mdp, report));
    if (!out_policy.empty())
      write_text_file(out_policy, serialize_policy(mdp, report.policy));
    if (!out_csv.empty()) write_text_file(out_csv, report_to_csv(mdp, report));
  }
};

void print_summary(const Mdp& mdp, const SynthesisReport& report) {
  std::cout << "method " << report.method << "\n";
  std::cout << "reach " << format_double(report.reach) << "\n";
  std::cout << "cost " << format_double(report.cost) << "\n";
  if (report.surrogate_cost)
    std::cout << "surrogate " << format_double(*report.surrogate_cost) << "\n";
  if (report.infimum)
    std::cout << "infimum " << format_double(*report.infimum) << "\n";
  for (const auto& [key, value] : report.bounds)
    std::cout << "bound " << key << " " << format_double(value) << "\n";
  std::cout << "wall_ms " << format_double(report.wall_ms) << "\n";
  for (const std::string& d : report.diagnostics)
    std::cout << "note " << d << "\n";
  const std::vector<int> choices = report.policy.choices();
  for (int s = 0; s < mdp.num_states(); ++s) {
    std::cout << "policy " << mdp.state_names[s];
    if (choices[s] >= 0) {
      std::cout << " " << mdp.actions[s][choices[s]].name << "\n";
      continue;
    }
    for (int a = 0; a < mdp.num_actions(s); ++a)
      if (report.policy.prob[s][a] != 0.0)
        std::cout << " " << mdp.actions[s][a].name << ":"
                  << format_double(report.policy.prob[s][a]);
    std::cout << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"policy synthesis for reachability MDPs with discounted costs"};
  app.require_subcommand(1);

  std::string mdp_path, layout_path, policy_path, csv_path, out_path;
  double eps = 0.1, k = 100.0, time_limit = std::numeric_limits<double>::infinity();
  bool zero_terminal = false;
  SimulationOptions sim;
  std::size_t max_policies = 1000000;
  ReportSinks sinks;

  auto* validate_cmd = app.add_subcommand("validate", "check an MDP file");
  validate_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  validate_cmd->callback([&] {
    try {
      const Mdp mdp = load_mdp_file(mdp_path);
      std::cout << "valid: " << mdp.num_states() << " states, "
                << mdp.num_pairs() << " state/action pairs\n";
    } catch (const std::runtime_error& err) {
      std::cout << err.what() << "\n";
      throw CLI::RuntimeError(1);
    }
  });

  auto* reach_cmd = app.add_subcommand("reach", "maximum reach probabilities");
  reach_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  reach_cmd->add_option("--csv", csv_path, "write the per-state table as CSV");
  reach_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const ReachAnalysis ra = max_reach(mdp);
    std::ostringstream csv;
    csv << "state,x,class,amax\n";
    for (int s = 0; s < mdp.num_states(); ++s) {
      const char* cls = ra.partition.in_target[s]
                            ? "target"
                            : (ra.partition.in_zero[s] ? "zero" : "rest");
      std::ostringstream names;
      for (std::size_t i = 0; i < ra.amax[s].size(); ++i)
        names << (i ? "|" : "") << mdp.actions[s][ra.amax[s][i]].name;
      std::cout << mdp.state_names[s] << " x=" << format_double(ra.x[s])
                << " class=" << cls << " amax=" << names.str() << "\n";
      csv << mdp.state_names[s] << "," << format_double(ra.x[s]) << "," << cls
          << "," << names.str() << "\n";
    }
    std::cout << "x_initial " << format_double(ra.x[mdp.initial]) << "\n";
    if (!csv_path.empty()) write_text_file(csv_path, csv.str());
  });

  auto* cleanup_cmd =
      app.add_subcommand("cleanup", "prune actions that lose reach probability");
  cleanup_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  cleanup_cmd->add_option("--out", out_path, "write the pruned MDP here");
  cleanup_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const Mdp pruned = cleanup(mdp, max_reach(mdp));
    const std::string text = serialize_mdp_document(document_from_mdp(pruned));
    if (out_path.empty())
      std::cout << text;
    else
      write_text_file(out_path, text);
    std::cerr << "kept " << pruned.num_pairs() << " of " << mdp.num_pairs()
              << " state/action pairs\n";
  });

  auto* eps_cmd = app.add_subcommand(
      "synth-eps", "epsilon-optimal policy among reach maximizers");
  eps_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  eps_cmd->add_option("--eps", eps, "cost slack over the infimum")
      ->required()
      ->check(CLI::PositiveNumber);
  sinks.attach(eps_cmd);
  eps_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const SynthesisReport report = synth_eps_optimal(mdp, eps);
    print_summary(mdp, report);
    sinks.deliver(mdp, report);
  });

  auto* exists_cmd = app.add_subcommand(
      "check-exists", "does an optimal policy exist for this instance");
  exists_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  exists_cmd->add_option("--out", out_path, "write the certificate as JSON");
  exists_cmd->add_option("--policy", policy_path,
                         "write the witness policy when one exists");
  exists_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const ExistenceCertificate cert = check_existence(mdp);
    if (cert.exists) {
      std::cout << "optimal policy exists; cost "
                << format_double(cert.infimum) << " at reach "
                << format_double(cert.x_initial) << "\n";
    } else {
      std::cout << "no optimal policy; infimum "
                << format_double(cert.infimum)
                << " is not attained at reach "
                << format_double(cert.x_initial) << "\n";
    }
    for (const std::string& d : cert.diagnostics) std::cout << "note " << d << "\n";
    if (!out_path.empty()) {
      std::ostringstream j;
      j << "{\n  \"exists\": " << (cert.exists ? "true" : "false")
        << ",\n  \"infimum\": " << format_double(cert.infimum)
        << ",\n  \"x_initial\": " << format_double(cert.x_initial)
        << ",\n  \"xbar_initial\": " << format_double(cert.xbar_initial)
        << "\n}\n";
      write_text_file(out_path, j.str());
    }
    if (!policy_path.empty() && cert.witness)
      save_policy_file(policy_path, mdp, *cert.witness);
  });

  auto* exact_cmd = app.add_subcommand(
      "synth-exact", "exact deterministic optimum via branch and bound");
  exact_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  exact_cmd->add_option("--k", k, "big-M multiplier for stochastic instances");
  exact_cmd->add_option("--time-limit", time_limit, "seconds before giving up");
  sinks.attach(exact_cmd);
  exact_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const SynthesisReport report = solve_exact(mdp, k, time_limit);
    print_summary(mdp, report);
    sinks.deliver(mdp, report);
  });

  auto* approx_cmd = app.add_subcommand(
      "synth-approx", "two-LP approximation with suboptimality certificates");
  approx_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  approx_cmd->add_option("--k", k, "big-M multiplier for stochastic instances");
  approx_cmd->add_flag("--zero-terminal-costs", zero_terminal,
                       "force costs on target/zero states to zero");
  sinks.attach(approx_cmd);
  approx_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const SynthesisReport report = synth_approx(mdp, k, zero_terminal);
    print_summary(mdp, report);
    sinks.deliver(mdp, report);
  });

  auto* sim_cmd =
      app.add_subcommand("simulate", "Monte-Carlo rollout of a policy file");
  sim_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  sim_cmd->add_option("--policy-file", policy_path, "policy to roll out")
      ->required();
  sim_cmd->add_option("--episodes", sim.episodes, "episode count");
  sim_cmd->add_option("--horizon", sim.horizon, "steps per episode");
  sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim_cmd->add_option("--csv", csv_path, "write per-episode rows as CSV");
  sim_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const StationaryPolicy policy = load_policy_file(policy_path, mdp);
    const SimulationResult res = simulate(mdp, policy, sim);
    std::cout << "episodes " << res.episodes << " horizon " << res.horizon
              << "\n";
    std::cout << "reach " << format_double(res.reach_estimate) << " +- "
              << format_double(res.reach_stderr) << "\n";
    std::cout << "cost " << format_double(res.cost_estimate) << " +- "
              << format_double(res.cost_stderr) << " (truncation <= "
              << format_double(res.tail_bound) << ")\n";
    if (!csv_path.empty())
      write_text_file(csv_path, simulate_csv(mdp, policy, sim));
  });

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "brute-force enumeration of deterministic policies");
  oracle_cmd->add_option("mdp", mdp_path, "MDP file")->required();
  oracle_cmd->add_option("--max-policies", max_policies,
                         "refuse instances with more policies than this");
  oracle_cmd->add_option("--csv", csv_path, "write the full table as CSV");
  oracle_cmd->callback([&] {
    const Mdp mdp = load_mdp_file(mdp_path);
    const OracleResult res = brute_force_oracle(mdp, max_policies);
    std::cout << "x_initial " << format_double(res.x_initial) << "\n";
    std::cout << "best_cost " << format_double(res.best_cost) << "\n";
    for (int s = 0; s < mdp.num_states(); ++s)
      std::cout << "best " << mdp.state_names[s] << " "
                << mdp.actions[s][res.best_choice[s]].name << "\n";
    if (!csv_path.empty()) {
      std::ostringstream csv;
      csv << "reach,cost,feasible";
      for (int s = 0; s < mdp.num_states(); ++s)
        csv << "," << mdp.state_names[s];
      csv << "\n";
      for (const OracleEntry& e : res.table) {
        csv << format_double(e.reach) << "," << format_double(e.cost) << ","
            << (e.feasible ? 1 : 0);
        for (int s = 0; s < mdp.num_states(); ++s)
          csv << "," << mdp.actions[s][e.choice[s]].name;
        csv << "\n";
      }
      write_text_file(csv_path, csv.str());
    }
  });

  auto* grid_cmd =
      app.add_subcommand("gridworld", "generate an MDP from a grid layout");
  grid_cmd->add_option("--layout", layout_path, "grid layout file")->required();
  grid_cmd->add_option("--out", out_path, "write the MDP here");
  grid_cmd->add_option("--csv", csv_path, "write the cell table as CSV");
  grid_cmd->callback([&] {
    const GridSpec spec = load_grid_file(layout_path);
    const Mdp mdp = generate_grid(spec);
    const std::string text = serialize_mdp_document(document_from_mdp(mdp));
    if (out_path.empty())
      std::cout << text;
    else
      write_text_file(out_path, text);
    std::cerr << spec.width << "x" << spec.height << " grid, "
              << mdp.num_states() << " states\n";
    if (!csv_path.empty()) write_text_file(csv_path, grid_to_csv(spec));
  });

  auto* compare_cmd = app.add_subcommand(
      "compare", "run approx / total-cost / discounted baseline side by side");
  compare_cmd->add_option("mdp", mdp_path, "MDP file")
      ->excludes(compare_cmd->add_option("--layout", layout_path,
                                         "grid layout file instead of an MDP"));
  compare_cmd->add_option("--k", k, "big-M multiplier for stochastic instances");
  compare_cmd->add_flag("--zero-terminal-costs", zero_terminal,
                        "force costs on target/zero states to zero");
  compare_cmd->callback([&] {
    std::optional<GridSpec> spec;
    Mdp mdp;
    if (!layout_path.empty()) {
      spec = load_grid_file(layout_path);
      mdp = generate_grid(*spec);
    } else if (!mdp_path.empty()) {
      mdp = load_mdp_file(mdp_path);
    } else {
      throw CLI::ValidationError("compare", "needs an MDP file or --layout");
    }
    const SynthesisReport reports[] = {synth_approx(mdp, k, zero_terminal),
                                       synth_total_cost(mdp, zero_terminal),
                                       synth_discounted_baseline(mdp)};
    std::cout << "method,reach,cost,surrogate,wall_ms\n";
    for (const SynthesisReport& r : reports)
      std::cout << r.method << "," << format_double(r.reach) << ","
                << format_double(r.cost) << ","
                << (r.surrogate_cost ? format_double(*r.surrogate_cost) : "-")
                << "," << format_double(r.wall_ms) << "\n";
    for (const SynthesisReport& r : reports) {
      const std::vector<int> path =
          most_likely_trajectory(mdp, r.policy, 4 * mdp.num_states());
      std::cout << "route " << r.method;
      int high = 0, moderate = 0;
      for (int s : path) {
        std::cout << " " << mdp.state_names[s];
        if (spec && !mdp.is_target(s)) {
          const RiskClass risk = risk_of_state(*spec, mdp.state_names[s]);
          high += risk == RiskClass::kHigh;
          moderate += risk == RiskClass::kModerate;
        }
      }
      std::cout << "\n";
      if (spec)
        std::cout << "risk " << r.method << " high=" << high
                  << " moderate=" << moderate << " steps="
                  << path.size() - 1 << "\n";
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
