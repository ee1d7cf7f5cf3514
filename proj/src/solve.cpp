#include "bbfair/errors.hpp"
#include "bbfair/lp.hpp"
#include "bbfair/ode_solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace bbfair {

namespace {

ToleranceConfig polish_tolerances(const ToleranceConfig& tol) {
  ToleranceConfig strict = tol;
  strict.eps_feasible = tol.polish_eps;
  strict.eps_bottleneck = tol.polish_eps;
  strict.eps_njc = tol.polish_eps;
  return strict;
}

// Closest point (infinity norm) to `target` with the columns in `active`
// binding and user i justified by column justify[i].
std::optional<std::pair<Allocation, double>> assignment_lp(const LiftedInstance& inst,
                                                            const std::vector<std::size_t>& active,
                                                            const std::vector<std::size_t>& justify,
                                                            const Allocation& target) {
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  auto program = lp::LinearProgram::with_box(static_cast<std::size_t>(n) + 1);
  program.objective[n] = -1.0;
  for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row.head(n) = inst.requirements.col(j);
    const bool binding = std::find(active.begin(), active.end(), static_cast<std::size_t>(j)) != active.end();
    program.add(row, binding ? lp::Relation::Equal : lp::Relation::LessEqual, 1.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    const double e = inst.entitlements[i];
    if (e > 0.0) {
      row[i] = inst.requirements(i, static_cast<Eigen::Index>(justify[static_cast<std::size_t>(i)]));
      program.add(row, lp::Relation::GreaterEqual, e);
    }
    Eigen::VectorXd up = Eigen::VectorXd::Zero(n + 1);
    up[i] = 1.0;
    up[n] = -1.0;
    program.add(up, lp::Relation::LessEqual, target[i]);
    Eigen::VectorXd down = Eigen::VectorXd::Zero(n + 1);
    down[i] = -1.0;
    down[n] = -1.0;
    program.add(down, lp::Relation::LessEqual, -target[i]);
  }
  const auto res = lp::maximize(program);
  if (!res.optimal()) return std::nullopt;
  return std::make_pair(Allocation(res.x.head(n)), res.x[n]);
}

}  // namespace

std::optional<PolishResult> polish(const LiftedInstance& inst, const Allocation& numeric, const ToleranceConfig& tol) {
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  if (n == 0 || numeric.size() != n) return std::nullopt;
  const Eigen::VectorXd slack = Eigen::VectorXd::Ones(inst.requirements.cols()) - inst.requirements.transpose() * numeric;
  const ProblemInstance as_problem = inst.as_problem();
  const ToleranceConfig strict = polish_tolerances(tol);

  std::vector<double> thresholds{tol.polish_detect};
  for (double th : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3})
    if (th != tol.polish_detect) thresholds.push_back(th);

  for (const double threshold : thresholds) {
    std::vector<std::size_t> active;
    for (Eigen::Index j = 0; j < slack.size(); ++j)
      if (slack[j] <= threshold) active.push_back(static_cast<std::size_t>(j));
    if (active.empty()) continue;
    std::vector<std::size_t> justify;
    for (Eigen::Index i = 0; i < n; ++i) {
      std::size_t best = active.front();
      for (const auto j : active)
        if (inst.requirements(i, static_cast<Eigen::Index>(j)) > inst.requirements(i, static_cast<Eigen::Index>(best)))
          best = j;
      justify.push_back(best);
    }
    const auto candidate = assignment_lp(inst, active, justify, numeric);
    if (!candidate || candidate->second > 1e-3) continue;
    Allocation x = candidate->first.cwiseMax(0.0);
    if (!verify(as_problem, x, strict).passed()) continue;
    return PolishResult{std::move(x), threshold, candidate->second};
  }
  return std::nullopt;
}

namespace {

// Residual problem in which every remaining user has zero entitlement: any
// Pareto-maximal point is fair, so take a vertex maximizing sum_i x_i.
Allocation zero_entitlement_point(const LiftedInstance& inst) {
  auto program = lp::LinearProgram::with_box(inst.num_users(), 0.0, 1.0);
  program.objective.setOnes();
  for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j)
    program.add(inst.requirements.col(j), lp::Relation::LessEqual, 1.0);
  const auto res = lp::maximize(program);
  if (!res.optimal()) throw ConsistencyError("zero-entitlement residual problem has no optimum");
  return res.x;
}

}  // namespace

SolveResult solve(const ProblemInstance& inst, const ToleranceConfig& tol, const SolveOptions& options) {
  tol.validate();
  SolveResult result;
  result.trace = preprocess(inst, tol, PreprocessOptions{options.remove_dominated});
  const LiftedInstance& reduced = result.trace.final;

  Allocation reduced_x;
  if (reduced.num_users() == 0) {
    reduced_x = Allocation::Zero(0);
    result.termination = Termination::Converged;
  } else if (!(reduced.entitlements.sum() > tol.eps_input)) {
    reduced_x = zero_entitlement_point(reduced);
    result.termination = Termination::Converged;
  } else {
    auto traj = integrate_trajectory(reduced, tol);
    result.termination = traj.termination;
    const Allocation numeric = traj.points.back().x;
    result.numeric = lift_allocation(result.trace, numeric);
    reduced_x = numeric;
    if (auto polished = polish(reduced, numeric, tol)) {
      const Allocation lifted = lift_allocation(result.trace, polished->x);
      if (verify(inst, lifted, tol).passed()) {
        reduced_x = polished->x;
        result.polish_applied = true;
        result.polish_threshold = polished->threshold;
      }
    }
    if (options.record_trajectory) result.trajectory = std::move(traj.points);
  }

  const Allocation x = lift_allocation(result.trace, reduced_x);
  if (result.numeric.size() == 0) result.numeric = x;
  result.report = verify(inst, x, tol);
  result.solution = to_solution(x, result.report);
  result.verified = result.report.passed();
  if (!result.verified) {
    std::ostringstream os;
    os << "solution failed verification (termination " << to_string(result.termination)
       << (result.polish_applied ? ", polished" : ", unpolished") << ")\n"
       << render_text(inst, result.report);
    result.diagnostic = os.str();
  }
  return result;
}

Allocation lift_point(const ReductionTrace& trace, const TrajectoryPoint& p) { return lift_allocation(trace, p.x); }

std::string trajectory_csv(const ReductionTrace& trace, const std::vector<TrajectoryPoint>& points, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::ostringstream os;
  os << std::setprecision(10);
  os << "t";
  for (std::size_t i = 0; i < trace.original_users; ++i) os << ",x_" << i + 1;
  os << ",f,min_slack\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k % stride != 0 && k + 1 != points.size()) continue;
    const auto& p = points[k];
    const Allocation x = lift_point(trace, p);
    os << p.t;
    for (Eigen::Index i = 0; i < x.size(); ++i) os << "," << x[i];
    os << "," << p.f_value + 0.0 << "," << p.min_slack() << "\n";
  }
  return os.str();
}

}  // namespace bbfair
