#include "mdpsynth/linprog.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace mdpsynth {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Dense two-phase tableau. Variables entering here are already shifted to
// zero lower bounds; finite upper bounds arrive as extra rows.
class Tableau {
 public:
  enum class Step { kPivoted, kOptimal, kUnbounded };

  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
          const std::vector<LpRelation>& rel)
      : m_(static_cast<int>(b.size())), n_(static_cast<int>(a.cols())) {
    // Count extra columns.
    int slacks = 0, artificials = 0;
    for (const auto r : rel) {
      if (r != LpRelation::kEq) ++slacks;
      if (r != LpRelation::kLe) ++artificials;
    }
    cols_ = n_ + slacks + artificials;
    t_ = Eigen::MatrixXd::Zero(m_, cols_ + 1);
    t_.topLeftCorner(m_, n_) = a;
    t_.col(cols_) = b;
    basis_.assign(m_, -1);
    marker_.assign(m_, -1);
    art_begin_ = n_ + slacks;
    int next_slack = n_, next_art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      if (rel[i] == LpRelation::kLe) {
        t_(i, next_slack) = 1.0;
        basis_[i] = next_slack;
        marker_[i] = next_slack;
        ++next_slack;
      } else if (rel[i] == LpRelation::kGe) {
        t_(i, next_slack) = -1.0;
        ++next_slack;
        t_(i, next_art) = 1.0;
        basis_[i] = next_art;
        marker_[i] = next_art;
        ++next_art;
      } else {
        t_(i, next_art) = 1.0;
        basis_[i] = next_art;
        marker_[i] = next_art;
        ++next_art;
      }
    }
    active_.assign(m_, 1);
    locked_.assign(cols_, 0);
  }

  // Minimizes the sum of artificial variables. Returns the residual.
  double phase1() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    for (int j = art_begin_; j < cols_; ++j) cost[j] = 1.0;
    run(cost);
    double residual = 0.0;
    for (int i = 0; i < m_; ++i)
      if (active_[i] && basis_[i] >= art_begin_) residual += t_(i, cols_);
    return residual;
  }

  // Pivots leftover artificials out of the basis (they all sit at zero once
  // phase 1 succeeded); rows that cannot be repaired are redundant and get
  // deactivated. Afterwards artificial columns are locked for good.
  void drop_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < art_begin_) continue;
      int col = -1;
      for (int j = 0; j < art_begin_; ++j)
        if (!locked_[j] && std::abs(t_(i, j)) > kPhase1Tol) {
          col = j;
          break;
        }
      if (col >= 0)
        pivot(i, col);
      else
        active_[i] = 0;
    }
    for (int j = art_begin_; j < cols_; ++j) locked_[j] = 1;
  }

  // Minimizes cᵀx over the current feasible basis.
  LpStatus phase2(const Eigen::VectorXd& structural_cost) {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols_);
    cost.head(n_) = structural_cost;
    return run(cost);
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (active_[i] && basis_[i] < n_) x[basis_[i]] = t_(i, cols_);
    return x;
  }

  // Dual price of each row, read off the reduced cost of its marker column.
  Eigen::VectorXd duals() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i)
      if (active_[i]) y[i] = -reduced_[marker_[i]];
    return y;
  }

  long iterations() const { return iterations_; }
  bool hit_iteration_limit() const { return hit_limit_; }

 private:
  void refresh_reduced(const Eigen::VectorXd& cost) {
    reduced_ = cost;
    for (int i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double cb = cost[basis_[i]];
      if (cb != 0.0) reduced_ -= cb * t_.row(i).head(cols_);
    }
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < m_; ++i) {
      if (i == row) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(row);
    }
    const double rf = reduced_[col];
    if (rf != 0.0) reduced_ -= rf * t_.row(row).head(cols_);
    // Snap the pivot column to an exact unit vector.
    t_.col(col).setZero();
    t_(row, col) = 1.0;
    reduced_[col] = 0.0;
    basis_[row] = col;
    ++iterations_;
  }

  Step step(bool bland) {
    int enter = -1;
    if (bland) {
      for (int j = 0; j < cols_; ++j)
        if (!locked_[j] && reduced_[j] < -kPivotTol) {
          enter = j;
          break;
        }
    } else {
      double best = -kPivotTol;
      for (int j = 0; j < cols_; ++j)
        if (!locked_[j] && reduced_[j] < best) {
          best = reduced_[j];
          enter = j;
        }
    }
    if (enter < 0) return Step::kOptimal;

    int leave = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || t_(i, enter) <= kPivotTol) continue;
      const double ratio = t_(i, cols_) / t_(i, enter);
      if (leave < 0) {
        best_ratio = ratio;
        leave = i;
        continue;
      }
      const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
      if (ratio < best_ratio - slack) {
        best_ratio = ratio;
        leave = i;
      } else if (ratio <= best_ratio + slack && basis_[i] < basis_[leave]) {
        leave = i;  // Bland-compatible tie break on the basic variable id.
      }
    }
    if (leave < 0) return Step::kUnbounded;
    pivot(leave, enter);
    return Step::kPivoted;
  }

  LpStatus run(const Eigen::VectorXd& cost) {
    refresh_reduced(cost);
    const long bland_after = 5L * (m_ + cols_);
    const long cap = 20000L + 200L * (m_ + cols_);
    long local = 0;
    while (true) {
      if (local >= cap) {
        hit_limit_ = true;
        return LpStatus::kIterationLimit;
      }
      if (local > 0 && local % 256 == 0) refresh_reduced(cost);
      const Step result = step(local >= bland_after);
      if (result == Step::kOptimal) {
        refresh_reduced(cost);
        // A refresh can re-expose a marginally negative column; finish with
        // Bland steps to stay deterministic.
        while (step(true) == Step::kPivoted) {
          if (++local >= cap) {
            hit_limit_ = true;
            return LpStatus::kIterationLimit;
          }
        }
        return LpStatus::kOptimal;
      }
      if (result == Step::kUnbounded) return LpStatus::kUnbounded;
      ++local;
    }
  }

  int m_ = 0, n_ = 0, cols_ = 0, art_begin_ = 0;
  Eigen::MatrixXd t_;
  Eigen::VectorXd reduced_;
  std::vector<int> basis_;
  std::vector<int> marker_;
  std::vector<char> active_;
  std::vector<char> locked_;
  long iterations_ = 0;
  bool hit_limit_ = false;
};

struct Prepared {
  // Free (non-fixed) variable ids and their lower-bound shifts.
  std::vector<int> free_vars;
  std::vector<int> column_of;  // original var -> tableau column or -1
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  std::vector<LpRelation> rel;
  std::vector<double> row_sign;  // user row i multiplied by this
  int user_rows = 0;
  Eigen::VectorXd cost;
  double objective_shift = 0.0;
  std::vector<double> fixed_value;  // per original var; NaN when free
};

Prepared prepare(const LinearProgram& lp, double sign) {
  const int nv = lp.num_vars();
  Prepared prep;
  prep.column_of.assign(nv, -1);
  prep.fixed_value.assign(nv, std::numeric_limits<double>::quiet_NaN());

  for (int j = 0; j < nv; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    if (!std::isfinite(lo))
      throw std::invalid_argument("solve_lp: variable " + lp.var_names[j] +
                                  " needs a finite lower bound");
    if (hi < lo - 1e-12)
      throw std::invalid_argument("solve_lp: empty bound interval on " +
                                  lp.var_names[j]);
    if (hi - lo <= 1e-12) {
      prep.fixed_value[j] = lo;
    } else {
      prep.column_of[j] = static_cast<int>(prep.free_vars.size());
      prep.free_vars.push_back(j);
    }
  }
  const int n = static_cast<int>(prep.free_vars.size());

  int bound_rows = 0;
  for (int j : prep.free_vars)
    if (std::isfinite(lp.upper[j])) ++bound_rows;
  prep.user_rows = static_cast<int>(lp.rows.size());
  const int m = prep.user_rows + bound_rows;

  prep.a = Eigen::MatrixXd::Zero(m, n);
  prep.b = Eigen::VectorXd::Zero(m);
  prep.rel.assign(m, LpRelation::kLe);
  prep.row_sign.assign(prep.user_rows, 1.0);

  for (int i = 0; i < prep.user_rows; ++i) {
    const LpRow& row = lp.rows[i];
    double rhs = row.rhs;
    for (const auto& [var, coef] : row.coeffs) {
      if (var < 0 || var >= nv)
        throw std::invalid_argument("solve_lp: row " + row.name +
                                    " references unknown variable");
      if (prep.column_of[var] < 0)
        rhs -= coef * prep.fixed_value[var];
      else {
        prep.a(i, prep.column_of[var]) += coef;
        rhs -= coef * lp.lower[var];
      }
    }
    prep.b[i] = rhs;
    prep.rel[i] = row.rel;
    if (rhs < 0.0) {
      prep.a.row(i) = -prep.a.row(i);
      prep.b[i] = -rhs;
      prep.row_sign[i] = -1.0;
      if (row.rel == LpRelation::kLe)
        prep.rel[i] = LpRelation::kGe;
      else if (row.rel == LpRelation::kGe)
        prep.rel[i] = LpRelation::kLe;
    }
  }
  int next = prep.user_rows;
  for (int j : prep.free_vars)
    if (std::isfinite(lp.upper[j])) {
      prep.a(next, prep.column_of[j]) = 1.0;
      prep.b[next] = lp.upper[j] - lp.lower[j];
      prep.rel[next] = LpRelation::kLe;
      ++next;
    }

  prep.cost = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < nv; ++j) {
    const double c = sign * lp.objective[j];
    if (prep.column_of[j] >= 0) {
      prep.cost[prep.column_of[j]] = c;
      prep.objective_shift += c * lp.lower[j];
    } else {
      prep.objective_shift += c * prep.fixed_value[j];
    }
  }
  return prep;
}

}  // namespace

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

int LinearProgram::add_variable(std::string name, double obj, double lb,
                                double ub) {
  objective.push_back(obj);
  lower.push_back(lb);
  upper.push_back(ub);
  var_names.push_back(std::move(name));
  return num_vars() - 1;
}

void LinearProgram::add_row(LpRelation rel, double rhs,
                            std::vector<std::pair<int, double>> coeffs,
                            std::string name) {
  rows.push_back({std::move(coeffs), rel, rhs, std::move(name)});
}

int MixedIntegerProgram::add_binary(std::string name, double obj) {
  const int id = lp.add_variable(std::move(name), obj, 0.0, 1.0);
  binary.resize(lp.num_vars(), 0);
  binary[id] = 1;
  return id;
}

LpSolution solve_lp(const LinearProgram& lp) {
  const double sign = lp.sense == LpSense::kMaximize ? -1.0 : 1.0;
  Prepared prep = prepare(lp, sign);

  LpSolution solution;
  solution.x.assign(lp.num_vars(), 0.0);
  solution.duals.assign(lp.rows.size(), 0.0);

  Tableau tableau(prep.a, prep.b, prep.rel);
  const double residual = tableau.phase1();
  solution.iterations = tableau.iterations();
  if (tableau.hit_iteration_limit()) {
    solution.status = LpStatus::kIterationLimit;
    return solution;
  }
  if (residual > kPhase1Tol) {
    solution.status = LpStatus::kInfeasible;
    return solution;
  }
  tableau.drop_artificials();
  solution.status = tableau.phase2(prep.cost);
  solution.iterations = tableau.iterations();
  if (solution.status != LpStatus::kOptimal) return solution;

  const Eigen::VectorXd xs = tableau.primal();
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (prep.column_of[j] >= 0)
      solution.x[j] = xs[prep.column_of[j]] + lp.lower[j];
    else
      solution.x[j] = prep.fixed_value[j];
  }
  double obj = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j)
    obj += lp.objective[j] * solution.x[j];
  solution.objective = obj;

  const Eigen::VectorXd y = tableau.duals();
  for (int i = 0; i < prep.user_rows; ++i)
    solution.duals[i] = sign * prep.row_sign[i] * y[i];
  return solution;
}

MilpResult solve_milp(const MixedIntegerProgram& mip,
                      const MilpOptions& options) {
  if (mip.binary.size() != static_cast<std::size_t>(mip.lp.num_vars()))
    throw std::invalid_argument("solve_milp: binary mask size mismatch");
  const double sign = mip.lp.sense == LpSense::kMaximize ? -1.0 : 1.0;

  LinearProgram base = mip.lp;
  if (base.sense == LpSense::kMaximize) {
    base.sense = LpSense::kMinimize;
    for (double& c : base.objective) c = -c;
  }
  std::vector<int> binaries;
  for (int j = 0; j < base.num_vars(); ++j)
    if (mip.binary[j]) {
      base.lower[j] = std::max(base.lower[j], 0.0);
      base.upper[j] = std::min(base.upper[j], 1.0);
      binaries.push_back(j);
    }

  struct Node {
    std::vector<std::pair<int, char>> fixes;
    double bound;  // parent LP objective in minimization orientation
  };

  MilpResult result;
  double incumbent = kInf;
  std::vector<double> incumbent_x;
  std::vector<Node> stack;
  stack.push_back({{}, -kInf});
  double open_min_bound = -kInf;
  const auto started = std::chrono::steady_clock::now();

  while (!stack.empty()) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    if (elapsed > options.time_limit_sec || result.nodes >= options.node_limit) {
      result.timed_out = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.bound >= incumbent - options.gap_tol) continue;

    LinearProgram sub = base;
    for (const auto& [var, value] : node.fixes)
      sub.lower[var] = sub.upper[var] = static_cast<double>(value);
    const LpSolution relax = solve_lp(sub);
    ++result.nodes;
    result.lp_iterations += relax.iterations;
    if (relax.status == LpStatus::kInfeasible) continue;
    if (relax.status == LpStatus::kUnbounded) {
      result.status = LpStatus::kUnbounded;
      result.best_bound = -kInf;
      return result;
    }
    if (relax.status != LpStatus::kOptimal) {
      result.status = relax.status;
      return result;
    }
    if (relax.objective >= incumbent - options.gap_tol) continue;

    int branch_var = -1;
    double branch_score = 1e-6;  // integrality tolerance
    for (int j : binaries) {
      const double v = relax.x[j];
      const double score = std::min(v, 1.0 - v);
      if (score > branch_score + 1e-15) {
        branch_score = score;
        branch_var = j;
      }
    }
    if (branch_var < 0) {
      if (relax.objective < incumbent - 1e-12) {
        incumbent = relax.objective;
        incumbent_x = relax.x;
        for (int j : binaries) incumbent_x[j] = std::round(incumbent_x[j]);
      }
      continue;
    }
    const char near = relax.x[branch_var] >= 0.5 ? 1 : 0;
    Node far{node.fixes, relax.objective};
    far.fixes.emplace_back(branch_var, static_cast<char>(1 - near));
    Node close{std::move(node.fixes), relax.objective};
    close.fixes.emplace_back(branch_var, near);
    stack.push_back(std::move(far));
    stack.push_back(std::move(close));  // explored first
  }

  open_min_bound = incumbent;
  for (const Node& node : stack)
    open_min_bound = std::min(open_min_bound, node.bound);

  if (result.timed_out) {
    result.status = LpStatus::kTimeout;
  } else if (std::isfinite(incumbent)) {
    result.status = LpStatus::kOptimal;
  } else {
    result.status = LpStatus::kInfeasible;
  }
  if (std::isfinite(incumbent)) {
    result.objective = sign * incumbent;
    result.x = std::move(incumbent_x);
  }
  result.best_bound = sign * open_min_bound;
  return result;
}

namespace {

void append_terms(std::ostringstream& out,
                  const std::vector<std::pair<int, double>>& coeffs,
                  const std::vector<std::string>& names) {
  bool first = true;
  for (const auto& [var, coef] : coeffs) {
    if (!first) out << " + ";
    out << fmt(coef) << " " << names[var];
    first = false;
  }
  if (first) out << "0";
}

}  // namespace

std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  out << (lp.sense == LpSense::kMinimize ? "minimize\n" : "maximize\n");
  out << "  obj:";
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0)
      out << " + " << fmt(lp.objective[j]) << " " << lp.var_names[j];
  out << "\nsubject to\n";
  int unnamed = 0;
  for (const LpRow& row : lp.rows) {
    out << "  " << (row.name.empty() ? "r" + std::to_string(unnamed++) : row.name)
        << ": ";
    append_terms(out, row.coeffs, lp.var_names);
    out << (row.rel == LpRelation::kLe   ? " <= "
            : row.rel == LpRelation::kGe ? " >= "
                                         : " = ")
        << fmt(row.rhs) << "\n";
  }
  out << "bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    out << "  " << fmt(lp.lower[j]) << " <= " << lp.var_names[j];
    if (std::isfinite(lp.upper[j])) out << " <= " << fmt(lp.upper[j]);
    out << "\n";
  }
  return out.str();
}

std::string dump_milp(const MixedIntegerProgram& mip) {
  std::ostringstream out;
  out << dump_lp(mip.lp) << "binaries\n ";
  for (int j = 0; j < mip.lp.num_vars(); ++j)
    if (mip.binary[j]) out << " " << mip.lp.var_names[j];
  out << "\n";
  return out.str();
}

}  // namespace mdpsynth
