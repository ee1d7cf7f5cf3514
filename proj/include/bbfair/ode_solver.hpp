#pragma once

#include "bbfair/model.hpp"
#include "bbfair/preprocess.hpp"
#include "bbfair/verifier.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bbfair {

/// Per-column slack 1 - sum_k x_k r_kj. Throws DomainError naming the first
/// column with non-positive slack.
Eigen::VectorXd interior_slacks(const LiftedInstance& inst, const Allocation& x);

/// Barrier value f(x) = -sum_j log(slack_j).
double level_value(const LiftedInstance& inst, const Allocation& x);

struct Gradient {
  Eigen::VectorXd raw;   // df/dx_i = sum_j r_ij / slack_j
  Eigen::VectorXd unit;  // raw / |raw|
};

Gradient gradient(const LiftedInstance& inst, const Allocation& x);

/// dx/dt of the level-set trajectory at x, scaled so that df/dt = 1. The
/// point is not required to lie on the trajectory. Throws NumericalError on
/// an ill-conditioned system or a non-positive rate of change of f.
Eigen::VectorXd trajectory_derivative(const LiftedInstance& inst, const Allocation& x,
                                      const Eigen::VectorXd& entitlements, double condition_limit = 1e14);

struct TrajectoryPoint {
  double t = 0.0;
  Allocation x;
  double f_value = 0.0;
  Eigen::VectorXd normal;
  /// Common value of x_i nu_i / e_i.
  double normalization = 0.0;
  Eigen::VectorXd slacks;

  double min_slack() const { return slacks.size() ? slacks.minCoeff() : 1.0; }
};

/// max_i |x_i nu_i - kappa e_i| / kappa with kappa = sum_i x_i nu_i; 0 at the origin.
double normal_alignment_residual(const LiftedInstance& inst, const TrajectoryPoint& p);

TrajectoryPoint make_point(const LiftedInstance& inst, double t, const Allocation& x);

enum class Termination { Converged, BoundaryReached, TMaxReached, StepUnderflow };

std::string to_string(Termination t);

struct TrajectoryResult {
  std::vector<TrajectoryPoint> points;
  Termination termination = Termination::StepUnderflow;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Integrates the trajectory from the origin with an embedded Dormand-Prince
/// 5(4) pair, projecting back onto {f = t, x_i g_i proportional to e_i}
/// after every accepted step. Stops on convergence between t-doublings, when
/// the smallest slack drops below tol.slack_floor, at tol.t_max, or when the
/// step size underflows.
TrajectoryResult integrate_trajectory(const LiftedInstance& inst, const ToleranceConfig& tol = {});

/// Snaps a near-boundary point to the closest allocation (infinity norm) that
/// keeps the near-active columns exactly binding and every user justified.
/// Returns nullopt if no detection threshold yields a verified point.
struct PolishResult {
  Allocation x;
  double threshold = 0.0;
  double distance = 0.0;
};
std::optional<PolishResult> polish(const LiftedInstance& inst, const Allocation& numeric, const ToleranceConfig& tol);

struct SolveOptions {
  bool remove_dominated = true;
  bool record_trajectory = true;
};

struct SolveResult {
  Solution solution;
  bool verified = false;
  VerificationReport report;
  ReductionTrace trace;
  std::vector<TrajectoryPoint> trajectory;  // in reduced-instance coordinates
  Termination termination = Termination::StepUnderflow;
  bool polish_applied = false;
  double polish_threshold = 0.0;
  Allocation numeric;  // unpolished endpoint lifted to the original users
  std::string diagnostic;
};

SolveResult solve(const ProblemInstance& inst, const ToleranceConfig& tol = {}, const SolveOptions& options = {});

/// Trajectory point lifted to the original users (eliminated users at 1).
Allocation lift_point(const ReductionTrace& trace, const TrajectoryPoint& p);

/// CSV with header t,x_1,...,x_N,f,min_slack; one row every `stride` points
/// plus the final point.
std::string trajectory_csv(const ReductionTrace& trace, const std::vector<TrajectoryPoint>& points,
                           std::size_t stride = 1);

}  // namespace bbfair
