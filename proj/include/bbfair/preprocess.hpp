#pragma once

#include "bbfair/model.hpp"

#include <string>
#include <variant>
#include <vector>

namespace bbfair {

/// A real column whose total request is below capacity; it can never bind.
struct DropSlack {
  ColumnOrigin column;
  double column_sum = 0.0;
};

/// A user who asks for less than their entitlement everywhere gets x_i = 1.
/// Remaining entitlements are divided by `entitlement_divisor` (1 - e_i) and
/// the requests on each listed column by its divisor (1 - r_ij). A zero
/// entitlement divisor means the remaining entitlements were all zero.
struct EliminateUser {
  std::size_t user = 0;
  double entitlement = 0.0;
  double entitlement_divisor = 1.0;
  std::vector<std::pair<ColumnOrigin, double>> request_divisors;
};

/// A capacity constraint implied by the others (or a duplicate column).
struct RemoveDominated {
  ColumnOrigin column;
  double max_usage = 0.0;
  bool duplicate = false;
};

using ReductionStep = std::variant<DropSlack, EliminateUser, RemoveDominated>;

struct ReductionTrace {
  std::size_t original_users = 0;
  std::size_t original_resources = 0;
  std::vector<ReductionStep> steps;
  LiftedInstance final;

  std::vector<ColumnOrigin> dropped_slack_resources() const;
  std::vector<std::size_t> eliminated_users() const;
  std::vector<ColumnOrigin> removed_dominated() const;
};

struct PreprocessOptions {
  bool remove_dominated = true;
};

LiftedInstance add_dummy_resources(const ProblemInstance& inst);

/// Each stage appends what it did to `log` and returns the reduced instance.
LiftedInstance drop_slack_resources(const LiftedInstance& inst, std::vector<ReductionStep>& log);
LiftedInstance eliminate_satisfied_users(const LiftedInstance& inst, std::vector<ReductionStep>& log,
                                         const ToleranceConfig& tol = {});
LiftedInstance remove_dominated_constraints(const LiftedInstance& inst, std::vector<ReductionStep>& log,
                                            const ToleranceConfig& tol = {});

ReductionTrace preprocess(const ProblemInstance& inst, const ToleranceConfig& tol = {},
                          const PreprocessOptions& options = {});

/// Re-applies the recorded steps to the original instance.
LiftedInstance replay(const ProblemInstance& inst, const ReductionTrace& trace);

/// Eliminated users get 1, survivors keep their reduced value.
Allocation lift_allocation(const ReductionTrace& trace, const Allocation& reduced);

/// Lifts and re-detects bottlenecks / justifications on the original
/// instance. Throws ConsistencyError when the lifted point fails verification.
Solution lift_solution(const ProblemInstance& original, const ReductionTrace& trace, const Allocation& reduced,
                       const ToleranceConfig& tol = {});

std::string render_trace(const ProblemInstance& original, const ReductionTrace& trace);

/// "resource 3" / "dummy(user 2)", 1-based.
std::string describe_column(const ColumnOrigin& column);

}  // namespace bbfair
