#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace bbfair::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
  Eigen::VectorXd coefficients;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// maximize objective . x  subject to constraints and lower <= x <= upper.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LinearProgram {
  Eigen::VectorXd objective;
  std::vector<LinearConstraint> constraints;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static LinearProgram with_box(std::size_t n, double lo = 0.0,
                                double hi = std::numeric_limits<double>::infinity());

  std::size_t num_variables() const { return static_cast<std::size_t>(objective.size()); }

  LinearProgram& add(Eigen::VectorXd coefficients, Relation relation, double rhs);

  /// Throws InputError on inconsistent dimensions or inverted bounds.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;

  bool optimal() const { return status == Status::Optimal; }
};

/// Dense two-phase primal simplex with Bland's rule. Returns a basic optimal
/// solution; infeasible and unbounded are ordinary outcomes.
Result maximize(const LinearProgram& program);

/// Phase-one only: some point satisfying every constraint, or nullopt.
std::optional<Eigen::VectorXd> feasible(const std::vector<LinearConstraint>& constraints,
                                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Largest violation of any constraint or bound at x (0 when feasible).
double max_violation(const LinearProgram& program, const Eigen::VectorXd& x);

}  // namespace bbfair::lp
