#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace bbfair {

/// Per-user scale factors x_i in [0, 1]; one entry per user.
using Allocation = Eigen::VectorXd;

/// N users with entitlements e (summing to one) and an N x m' matrix of
/// requested capacity fractions r. Row i is user i's usage profile.
struct ProblemInstance {
  Eigen::VectorXd entitlements;
  Eigen::MatrixXd requirements;
  std::vector<std::string> user_names;
  std::vector<std::string> resource_names;

  std::size_t num_users() const { return static_cast<std::size_t>(requirements.rows()); }
  std::size_t num_resources() const { return static_cast<std::size_t>(requirements.cols()); }
};

/// One failed instance invariant. Indices are 0-based here and rendered
/// 1-based in reports.
struct Violation {
  std::string field;
  std::vector<std::size_t> index;
  double residual = 0.0;
  std::string message;
};

enum class ColumnKind { Real, Dummy };

/// Where a column of a lifted instance came from: a real resource of the
/// original instance, or the dummy resource of an original user.
struct ColumnOrigin {
  ColumnKind kind = ColumnKind::Real;
  std::size_t index = 0;

  bool operator==(const ColumnOrigin&) const = default;
};

/// Instance with one dummy column per user (r_{i,dummy(i)} = 1) so that the
/// "x_i = 1" case becomes an ordinary bottleneck. After preprocessing, rows
/// and columns may be a subset of the original ones and rescaled.
struct LiftedInstance {
  Eigen::VectorXd entitlements;
  Eigen::MatrixXd requirements;
  std::vector<std::size_t> users;      // original user index of each row
  std::vector<ColumnOrigin> columns;   // origin of each column

  std::size_t num_users() const { return static_cast<std::size_t>(requirements.rows()); }
  std::size_t num_columns() const { return static_cast<std::size_t>(requirements.cols()); }
  std::size_t num_real_columns() const;

  /// Treats every column (dummies included) as an ordinary resource.
  ProblemInstance as_problem() const;
};

struct Justification {
  enum class Kind { Resource, FullRequest, None };
  Kind kind = Kind::None;
  std::size_t resource = 0;

  bool operator==(const Justification&) const = default;
};

struct Solution {
  Allocation allocation;
  std::vector<std::size_t> bottlenecks;
  std::vector<Justification> justification;
  Eigen::VectorXd slacks;
};

struct ToleranceConfig {
  double eps_input = 1e-9;
  double eps_feasible = 1e-9;
  double eps_bottleneck = 1e-6;
  double eps_njc = 1e-6;

  // Trajectory integration.
  double t_max = 200.0;
  double initial_step = 1e-3;
  double min_step = 1e-12;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double slack_floor = 1e-9;
  double convergence_tol = 1e-9;
  double condition_limit = 1e14;

  // Polishing.
  double polish_detect = 1e-5;
  double polish_eps = 1e-9;

  double grid_resolution = 1e-4;

  /// Throws InputError naming the first offending field.
  void validate() const;
};

std::vector<Violation> validate_instance(const ProblemInstance& inst, double eps_input = 1e-9);

/// Throws InputError listing every violation.
void require_valid(const ProblemInstance& inst, double eps_input = 1e-9);

/// Sum_i x_i r_ij for every column.
Eigen::VectorXd usages(const Eigen::MatrixXd& requirements, const Allocation& x);

double resource_usage(const LiftedInstance& inst, const Allocation& x, std::size_t j);
double resource_usage(const ProblemInstance& inst, const Allocation& x, std::size_t j);

std::vector<std::size_t> bottleneck_set(const Eigen::MatrixXd& requirements, const Allocation& x,
                                        const ToleranceConfig& tol);
std::vector<std::size_t> bottleneck_set(const LiftedInstance& inst, const Allocation& x,
                                        const ToleranceConfig& tol);
std::vector<std::size_t> bottleneck_set(const ProblemInstance& inst, const Allocation& x,
                                        const ToleranceConfig& tol);

/// Fraction of user i's profile that bundle a can run: min over r_ij > 0 of
/// a_j / r_ij, capped at 1. A user who requests nothing gets 1.
double utility(const ProblemInstance& inst, std::size_t user, const Eigen::VectorXd& bundle);

/// x_i * r_i for every user, one row per user.
Eigen::MatrixXd bundles(const ProblemInstance& inst, const Allocation& x);

}  // namespace bbfair
