#include "bbfair/model.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bbfair {

std::size_t LiftedInstance::num_real_columns() const {
  return static_cast<std::size_t>(std::count_if(columns.begin(), columns.end(), [](const ColumnOrigin& c) {
    return c.kind == ColumnKind::Real;
  }));
}

ProblemInstance LiftedInstance::as_problem() const {
  ProblemInstance p;
  p.entitlements = entitlements;
  p.requirements = requirements;
  return p;
}

void ToleranceConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("tolerance ") + name + " must be positive");
  };
  positive(eps_input, "eps_input");
  positive(eps_feasible, "eps_feasible");
  positive(eps_bottleneck, "eps_bottleneck");
  positive(eps_njc, "eps_njc");
  positive(t_max, "t_max");
  positive(initial_step, "initial_step");
  positive(min_step, "min_step");
  positive(rel_tol, "rel_tol");
  positive(abs_tol, "abs_tol");
  positive(slack_floor, "slack_floor");
  positive(convergence_tol, "convergence_tol");
  positive(condition_limit, "condition_limit");
  positive(polish_detect, "polish_detect");
  positive(polish_eps, "polish_eps");
  positive(grid_resolution, "grid_resolution");
  if (eps_feasible > eps_bottleneck) throw InputError("tolerance eps_feasible must not exceed eps_bottleneck");
}

std::vector<Violation> validate_instance(const ProblemInstance& inst, double eps_input) {
  std::vector<Violation> out;
  const auto n = inst.num_users();
  const auto m = inst.num_resources();
  if (n == 0) out.push_back({"requirements", {}, 0.0, "instance has no users"});
  if (m == 0) out.push_back({"requirements", {}, 0.0, "instance has no resources"});
  if (static_cast<std::size_t>(inst.entitlements.size()) != n) {
    std::ostringstream os;
    os << "entitlements has " << inst.entitlements.size() << " entries but requirements has " << n << " rows";
    out.push_back({"entitlements", {}, 0.0, os.str()});
    return out;
  }
  if (!inst.user_names.empty() && inst.user_names.size() != n)
    out.push_back({"users", {}, 0.0, "users has " + std::to_string(inst.user_names.size()) + " names for " +
                                         std::to_string(n) + " users"});
  if (!inst.resource_names.empty() && inst.resource_names.size() != m)
    out.push_back({"resources", {}, 0.0, "resources has " + std::to_string(inst.resource_names.size()) +
                                             " names for " + std::to_string(m) + " resources"});

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = inst.entitlements[static_cast<Eigen::Index>(i)];
    if (!std::isfinite(e) || e < 0.0) {
      std::ostringstream os;
      os << "entitlement of user " << i + 1 << " is " << e << " (< 0)";
      out.push_back({"entitlements", {i}, e, os.str()});
    }
    sum += e;
  }
  if (n > 0 && !(std::abs(sum - 1.0) <= eps_input)) {
    std::ostringstream os;
    os << "entitlements sum " << sum << " != 1";
    out.push_back({"entitlements", {}, sum - 1.0, os.str()});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double r = inst.requirements(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!std::isfinite(r) || r < 0.0 || r > 1.0) {
        std::ostringstream os;
        os << "requirement of user " << i + 1 << " on resource " << j + 1 << " is " << r << " (outside [0, 1])";
        out.push_back({"requirements", {i, j}, r < 0.0 ? r : r - 1.0, os.str()});
      }
    }
  }
  return out;
}

void require_valid(const ProblemInstance& inst, double eps_input) {
  const auto violations = validate_instance(inst, eps_input);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid instance:";
  for (const auto& v : violations) os << "\n  " << v.field << ": " << v.message;
  throw InputError(os.str());
}

Eigen::VectorXd usages(const Eigen::MatrixXd& requirements, const Allocation& x) {
  if (x.size() != requirements.rows())
    throw InputError("allocation has " + std::to_string(x.size()) + " entries for " +
                     std::to_string(requirements.rows()) + " users");
  return requirements.transpose() * x;
}

namespace {

double column_usage(const Eigen::MatrixXd& r, const Allocation& x, std::size_t j) {
  if (x.size() != r.rows()) throw InputError("allocation length does not match the number of users");
  if (j >= static_cast<std::size_t>(r.cols()))
    throw InputError("resource index " + std::to_string(j + 1) + " out of range");
  return r.col(static_cast<Eigen::Index>(j)).dot(x);
}

}  // namespace

double resource_usage(const LiftedInstance& inst, const Allocation& x, std::size_t j) {
  return column_usage(inst.requirements, x, j);
}

double resource_usage(const ProblemInstance& inst, const Allocation& x, std::size_t j) {
  return column_usage(inst.requirements, x, j);
}

std::vector<std::size_t> bottleneck_set(const Eigen::MatrixXd& requirements, const Allocation& x,
                                        const ToleranceConfig& tol) {
  const Eigen::VectorXd u = usages(requirements, x);
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] > 1.0 + tol.eps_feasible) {
      std::ostringstream os;
      os << "allocation exceeds capacity of resource " << j + 1 << " (usage " << u[j] << ")";
      throw InfeasibleAllocation(os.str());
    }
    if (u[j] >= 1.0 - tol.eps_bottleneck) out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

std::vector<std::size_t> bottleneck_set(const LiftedInstance& inst, const Allocation& x,
                                        const ToleranceConfig& tol) {
  return bottleneck_set(inst.requirements, x, tol);
}

std::vector<std::size_t> bottleneck_set(const ProblemInstance& inst, const Allocation& x,
                                        const ToleranceConfig& tol) {
  return bottleneck_set(inst.requirements, x, tol);
}

double utility(const ProblemInstance& inst, std::size_t user, const Eigen::VectorXd& bundle) {
  if (user >= inst.num_users()) throw InputError("user index out of range");
  if (static_cast<std::size_t>(bundle.size()) != inst.num_resources())
    throw InputError("bundle length does not match the number of resources");
  double best = 1.0;
  const auto i = static_cast<Eigen::Index>(user);
  for (Eigen::Index j = 0; j < bundle.size(); ++j) {
    const double r = inst.requirements(i, j);
    if (r > 0.0) best = std::min(best, bundle[j] / r);
  }
  return best;
}

Eigen::MatrixXd bundles(const ProblemInstance& inst, const Allocation& x) {
  if (static_cast<std::size_t>(x.size()) != inst.num_users())
    throw InputError("allocation length does not match the number of users");
  return x.asDiagonal() * inst.requirements;
}

}  // namespace bbfair
