#pragma once

#include <limits>
#include <string>
#include <vector>

namespace mdpsynth {

enum class LpSense { kMinimize, kMaximize };
enum class LpRelation { kLe, kEq, kGe };

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeout,
};

std::string to_string(LpStatus status);

struct LpRow {
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  LpRelation rel = LpRelation::kLe;
  double rhs = 0.0;
  std::string name;
};

/// Dense-objective linear program over variables with finite lower bounds
/// (default 0) and optional upper bounds (default +inf).
struct LinearProgram {
  LpSense sense = LpSense::kMinimize;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> var_names;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int add_variable(std::string name, double obj, double lb = 0.0,
                   double ub = std::numeric_limits<double>::infinity());
  void add_row(LpRelation rel, double rhs,
               std::vector<std::pair<int, double>> coeffs,
               std::string name = "");
};

/// Primal solution plus one dual value per user row. Sign convention for the
/// duals: objective == sum_i duals[i]*rhs[i] whenever every variable has a
/// zero lower bound and no finite upper bound (general bounds fold the bound
/// multipliers into reduced costs, which are not exposed).
struct LpSolution {
  LpStatus status = LpStatus::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;
  long iterations = 0;
};

/// Two-phase dense tableau simplex. Dantzig pricing switches to Bland's rule
/// after 5*(rows+cols) iterations, so the method terminates and the result is
/// deterministic for a fixed input. Pivot tolerance 1e-9.
LpSolution solve_lp(const LinearProgram& lp);

/// Mixed-integer program: an LP plus a 0/1 integrality mark per variable.
struct MixedIntegerProgram {
  LinearProgram lp;
  std::vector<char> binary;  // per variable

  int add_binary(std::string name, double obj);
};

struct MilpOptions {
  double gap_tol = 1e-6;  // absolute incumbent-vs-bound gap
  double time_limit_sec = std::numeric_limits<double>::infinity();
  long node_limit = 50'000'000;
};

struct MilpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  double best_bound = -std::numeric_limits<double>::infinity();
  long nodes = 0;
  long lp_iterations = 0;
  bool timed_out = false;
};

/// LP-relaxation branch and bound: branches on the most fractional binary
/// (ties to the lowest variable index), explores depth-first taking the
/// nearest-integer child first, prunes against the incumbent. On timeout the
/// best incumbent and the proven bound so far are returned with kTimeout.
MilpResult solve_milp(const MixedIntegerProgram& mip,
                      const MilpOptions& options = {});

/// Human-readable fixed-point dump of a program, one row per line.
std::string dump_lp(const LinearProgram& lp);
std::string dump_milp(const MixedIntegerProgram& mip);

}  // namespace mdpsynth
