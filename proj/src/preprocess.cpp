#include "bbfair/preprocess.hpp"

#include "bbfair/errors.hpp"
#include "bbfair/lp.hpp"
#include "bbfair/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace bbfair {

std::vector<ColumnOrigin> ReductionTrace::dropped_slack_resources() const {
  std::vector<ColumnOrigin> out;
  for (const auto& s : steps)
    if (const auto* d = std::get_if<DropSlack>(&s)) out.push_back(d->column);
  return out;
}

std::vector<std::size_t> ReductionTrace::eliminated_users() const {
  std::vector<std::size_t> out;
  for (const auto& s : steps)
    if (const auto* e = std::get_if<EliminateUser>(&s)) out.push_back(e->user);
  return out;
}

std::vector<ColumnOrigin> ReductionTrace::removed_dominated() const {
  std::vector<ColumnOrigin> out;
  for (const auto& s : steps)
    if (const auto* r = std::get_if<RemoveDominated>(&s)) out.push_back(r->column);
  return out;
}

std::string describe_column(const ColumnOrigin& column) {
  if (column.kind == ColumnKind::Real) return "resource " + std::to_string(column.index + 1);
  return "dummy(user " + std::to_string(column.index + 1) + ")";
}

namespace {

Eigen::Index column_position(const LiftedInstance& inst, const ColumnOrigin& origin) {
  const auto it = std::find(inst.columns.begin(), inst.columns.end(), origin);
  if (it == inst.columns.end()) throw ConsistencyError("reduction step refers to missing " + describe_column(origin));
  return static_cast<Eigen::Index>(it - inst.columns.begin());
}

Eigen::Index row_position(const LiftedInstance& inst, std::size_t user) {
  const auto it = std::find(inst.users.begin(), inst.users.end(), user);
  if (it == inst.users.end()) throw ConsistencyError("reduction step refers to missing user " + std::to_string(user + 1));
  return static_cast<Eigen::Index>(it - inst.users.begin());
}

LiftedInstance without_column(const LiftedInstance& inst, Eigen::Index col) {
  LiftedInstance out;
  out.entitlements = inst.entitlements;
  out.users = inst.users;
  const Eigen::Index cols = inst.requirements.cols();
  out.requirements.resize(inst.requirements.rows(), cols - 1);
  out.requirements.leftCols(col) = inst.requirements.leftCols(col);
  out.requirements.rightCols(cols - col - 1) = inst.requirements.rightCols(cols - col - 1);
  out.columns = inst.columns;
  out.columns.erase(out.columns.begin() + col);
  return out;
}

LiftedInstance apply(const LiftedInstance& inst, const DropSlack& step) {
  return without_column(inst, column_position(inst, step.column));
}

LiftedInstance apply(const LiftedInstance& inst, const RemoveDominated& step) {
  return without_column(inst, column_position(inst, step.column));
}

LiftedInstance apply(const LiftedInstance& inst, const EliminateUser& step) {
  const Eigen::Index row = row_position(inst, step.user);
  LiftedInstance out;
  const Eigen::Index n = inst.requirements.rows();
  std::vector<Eigen::Index> keep_rows;
  for (Eigen::Index i = 0; i < n; ++i)
    if (i != row) keep_rows.push_back(i);
  std::vector<Eigen::Index> keep_cols;
  for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) {
    const auto& c = inst.columns[static_cast<std::size_t>(j)];
    if (c.kind == ColumnKind::Dummy && c.index == step.user) continue;
    keep_cols.push_back(j);
  }
  out.requirements = inst.requirements(keep_rows, keep_cols);
  out.entitlements.resize(static_cast<Eigen::Index>(keep_rows.size()));
  for (std::size_t k = 0; k < keep_rows.size(); ++k) {
    out.users.push_back(inst.users[static_cast<std::size_t>(keep_rows[k])]);
    const double e = inst.entitlements[keep_rows[k]];
    out.entitlements[static_cast<Eigen::Index>(k)] = step.entitlement_divisor > 0.0 ? e / step.entitlement_divisor : 0.0;
  }
  for (const auto j : keep_cols) out.columns.push_back(inst.columns[static_cast<std::size_t>(j)]);
  for (const auto& [origin, divisor] : step.request_divisors) {
    const Eigen::Index col = column_position(out, origin);
    if (divisor > 0.0) out.requirements.col(col) /= divisor;
    else out.requirements.col(col).setZero();
  }
  return out;
}

bool duplicates_earlier(const LiftedInstance& inst, Eigen::Index col, double eps) {
  for (Eigen::Index k = 0; k < col; ++k)
    if ((inst.requirements.col(k) - inst.requirements.col(col)).cwiseAbs().maxCoeff() <= eps) return true;
  return false;
}

}  // namespace

LiftedInstance add_dummy_resources(const ProblemInstance& inst) {
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  const auto m = static_cast<Eigen::Index>(inst.num_resources());
  LiftedInstance out;
  out.entitlements = inst.entitlements;
  out.requirements.resize(n, m + n);
  out.requirements.leftCols(m) = inst.requirements;
  out.requirements.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out.users.push_back(static_cast<std::size_t>(i));
  for (Eigen::Index j = 0; j < m; ++j) out.columns.push_back({ColumnKind::Real, static_cast<std::size_t>(j)});
  for (Eigen::Index i = 0; i < n; ++i) out.columns.push_back({ColumnKind::Dummy, static_cast<std::size_t>(i)});
  return out;
}

LiftedInstance drop_slack_resources(const LiftedInstance& inst, std::vector<ReductionStep>& log) {
  LiftedInstance cur = inst;
  for (Eigen::Index j = 0; j < cur.requirements.cols();) {
    const auto& origin = cur.columns[static_cast<std::size_t>(j)];
    const double sum = cur.requirements.col(j).sum();
    if (origin.kind == ColumnKind::Real && sum < 1.0) {
      DropSlack step{origin, sum};
      cur = apply(cur, step);
      log.emplace_back(step);
    } else {
      ++j;
    }
  }
  return cur;
}

LiftedInstance eliminate_satisfied_users(const LiftedInstance& inst, std::vector<ReductionStep>& log,
                                         const ToleranceConfig& tol) {
  LiftedInstance cur = inst;
  for (;;) {
    Eigen::Index victim = -1;
    for (Eigen::Index i = 0; i < cur.requirements.rows() && victim < 0; ++i) {
      bool all_below = true;
      bool all_zero = true;
      for (Eigen::Index j = 0; j < cur.requirements.cols(); ++j) {
        if (cur.columns[static_cast<std::size_t>(j)].kind != ColumnKind::Real) continue;
        const double r = cur.requirements(i, j);
        if (r >= cur.entitlements[i]) all_below = false;
        if (r != 0.0) all_zero = false;
      }
      if (all_below || all_zero) victim = i;
    }
    if (victim < 0) return cur;

    EliminateUser step;
    step.user = cur.users[static_cast<std::size_t>(victim)];
    step.entitlement = cur.entitlements[victim];
    const double remaining = 1.0 - step.entitlement;
    step.entitlement_divisor = remaining > tol.eps_input ? remaining : 0.0;
    for (Eigen::Index j = 0; j < cur.requirements.cols(); ++j) {
      const auto& origin = cur.columns[static_cast<std::size_t>(j)];
      if (origin.kind != ColumnKind::Real) continue;
      const double r = cur.requirements(victim, j);
      if (r == 0.0) continue;
      const double left = 1.0 - r;
      if (!(left > 0.0)) {
        // Capacity exhausted by the eliminated user.
        for (Eigen::Index k = 0; k < cur.requirements.rows(); ++k)
          if (k != victim && cur.requirements(k, j) > 0.0)
            throw InfeasibleAllocation("elimination of user " + std::to_string(step.user + 1) + " exhausts " +
                                       describe_column(origin) + " still requested by user " +
                                       std::to_string(cur.users[static_cast<std::size_t>(k)] + 1));
      }
      step.request_divisors.emplace_back(origin, left > 0.0 ? left : 0.0);
    }
    cur = apply(cur, step);
    log.emplace_back(step);
    cur = drop_slack_resources(cur, log);
  }
}

LiftedInstance remove_dominated_constraints(const LiftedInstance& inst, std::vector<ReductionStep>& log,
                                            const ToleranceConfig& tol) {
  LiftedInstance cur = inst;
  const auto n = cur.num_users();
  if (n == 0) return cur;
  bool removed = true;
  while (removed) {
    removed = false;
    for (Eigen::Index j = 0; j < cur.requirements.cols(); ++j) {
      RemoveDominated step{cur.columns[static_cast<std::size_t>(j)], 0.0, false};
      if (duplicates_earlier(cur, j, tol.eps_input)) {
        step.duplicate = true;
        step.max_usage = 1.0;
      } else {
        auto program = lp::LinearProgram::with_box(n);
        program.objective = cur.requirements.col(j);
        for (Eigen::Index k = 0; k < cur.requirements.cols(); ++k)
          if (k != j) program.add(cur.requirements.col(k), lp::Relation::LessEqual, 1.0);
        const auto res = lp::maximize(program);
        if (res.status != lp::Status::Optimal) continue;
        // Ties (the constraint touches the region) are kept.
        if (!(res.value < 1.0 - tol.eps_feasible)) continue;
        step.max_usage = res.value;
      }
      cur = apply(cur, step);
      log.emplace_back(step);
      removed = true;
      break;
    }
  }
  return cur;
}

ReductionTrace preprocess(const ProblemInstance& inst, const ToleranceConfig& tol, const PreprocessOptions& options) {
  require_valid(inst, tol.eps_input);
  ReductionTrace trace;
  trace.original_users = inst.num_users();
  trace.original_resources = inst.num_resources();
  LiftedInstance cur = add_dummy_resources(inst);
  cur = drop_slack_resources(cur, trace.steps);
  cur = eliminate_satisfied_users(cur, trace.steps, tol);
  // Removing a dominated column can leave a user with no real column covering
  // their entitlement; repeat until neither stage changes anything.
  while (options.remove_dominated) {
    const std::size_t before = trace.steps.size();
    cur = remove_dominated_constraints(cur, trace.steps, tol);
    if (trace.steps.size() == before) break;
    const std::size_t after = trace.steps.size();
    cur = eliminate_satisfied_users(cur, trace.steps, tol);
    if (trace.steps.size() == after) break;
  }
  trace.final = std::move(cur);
  return trace;
}

LiftedInstance replay(const ProblemInstance& inst, const ReductionTrace& trace) {
  LiftedInstance cur = add_dummy_resources(inst);
  for (const auto& step : trace.steps) cur = std::visit([&](const auto& s) { return apply(cur, s); }, step);
  return cur;
}

Allocation lift_allocation(const ReductionTrace& trace, const Allocation& reduced) {
  const auto& fin = trace.final;
  if (static_cast<std::size_t>(reduced.size()) != fin.num_users())
    throw InputError("reduced allocation has " + std::to_string(reduced.size()) + " entries for " +
                     std::to_string(fin.num_users()) + " remaining users");
  Allocation x = Allocation::Ones(static_cast<Eigen::Index>(trace.original_users));
  for (std::size_t k = 0; k < fin.users.size(); ++k)
    x[static_cast<Eigen::Index>(fin.users[k])] = reduced[static_cast<Eigen::Index>(k)];
  return x;
}

Solution lift_solution(const ProblemInstance& original, const ReductionTrace& trace, const Allocation& reduced,
                       const ToleranceConfig& tol) {
  const Allocation x = lift_allocation(trace, reduced);
  const auto report = verify(original, x, tol);
  if (!report.passed()) {
    std::ostringstream os;
    os << "lifted allocation fails verification on the original instance:\n" << render_text(original, report);
    throw ConsistencyError(os.str());
  }
  return to_solution(x, report);
}

std::string render_trace(const ProblemInstance& original, const ReductionTrace& trace) {
  auto user_name = [&](std::size_t i) {
    std::string s = "user " + std::to_string(i + 1);
    if (i < original.user_names.size()) s += " (" + original.user_names[i] + ")";
    return s;
  };
  auto column_name = [&](const ColumnOrigin& c) {
    std::string s = describe_column(c);
    if (c.kind == ColumnKind::Real && c.index < original.resource_names.size())
      s += " (" + original.resource_names[c.index] + ")";
    return s;
  };
  std::ostringstream os;
  os << std::setprecision(10);
  os << "reductions: " << trace.steps.size() << " step(s)\n";
  std::size_t k = 0;
  for (const auto& step : trace.steps) {
    os << "  " << ++k << ". ";
    if (const auto* d = std::get_if<DropSlack>(&step)) {
      os << "drop slack " << column_name(d->column) << " (column sum " << d->column_sum << " < 1)\n";
    } else if (const auto* e = std::get_if<EliminateUser>(&step)) {
      os << "eliminate " << user_name(e->user) << " (x = 1, entitlement " << e->entitlement << ")";
      if (e->entitlement_divisor > 0.0) os << "; entitlements scaled by 1/" << e->entitlement_divisor;
      else os << "; remaining entitlements zero";
      for (const auto& [origin, divisor] : e->request_divisors)
        os << "; " << column_name(origin) << " requests scaled by 1/" << divisor;
      os << "\n";
    } else if (const auto* r = std::get_if<RemoveDominated>(&step)) {
      os << "remove dominated " << column_name(r->column);
      if (r->duplicate) os << " (duplicate column)\n";
      else os << " (max usage " << r->max_usage << " under the other constraints)\n";
    }
  }
  const auto& fin = trace.final;
  os << "reduced system: " << fin.num_users() << " user(s), " << fin.num_real_columns() << " real + "
     << fin.num_columns() - fin.num_real_columns() << " dummy column(s)\n";
  os << "  users:";
  for (auto u : fin.users) os << " " << u + 1;
  os << "\n  entitlements:";
  for (Eigen::Index i = 0; i < fin.entitlements.size(); ++i) os << " " << fin.entitlements[i];
  os << "\n  columns:";
  for (const auto& c : fin.columns) os << " [" << column_name(c) << "]";
  os << "\n";
  return os.str();
}

}  // namespace bbfair
