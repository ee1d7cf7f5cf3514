#include "bbfair/ode_solver.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bbfair {

Eigen::VectorXd interior_slacks(const LiftedInstance& inst, const Allocation& x) {
  if (static_cast<std::size_t>(x.size()) != inst.num_users())
    throw InputError("allocation has " + std::to_string(x.size()) + " entries for " +
                     std::to_string(inst.num_users()) + " users");
  Eigen::VectorXd s = Eigen::VectorXd::Ones(inst.requirements.cols()) - inst.requirements.transpose() * x;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (!(s[j] > 0.0)) {
      std::ostringstream os;
      os << "point is not interior: " << describe_column(inst.columns[static_cast<std::size_t>(j)])
         << " has slack " << s[j];
      throw DomainError(os.str(), static_cast<std::size_t>(j));
    }
  }
  return s;
}

double level_value(const LiftedInstance& inst, const Allocation& x) {
  return -interior_slacks(inst, x).array().log().sum();
}

Gradient gradient(const LiftedInstance& inst, const Allocation& x) {
  const Eigen::VectorXd s = interior_slacks(inst, x);
  Gradient g;
  g.raw = inst.requirements * s.cwiseInverse();
  const double norm = g.raw.norm();
  g.unit = norm > 0.0 ? Eigen::VectorXd(g.raw / norm) : g.raw;
  return g;
}

namespace {

// b_ij = r_ij / slack_j
Eigen::MatrixXd scaled_requirements(const LiftedInstance& inst, const Eigen::VectorXd& s) {
  return inst.requirements * s.cwiseInverse().asDiagonal();
}

// M_ik = delta_ik sum_j b_ij + x_i sum_j b_ij b_kj
Eigen::MatrixXd trajectory_matrix(const Eigen::MatrixXd& b, const Allocation& x) {
  Eigen::MatrixXd m = x.asDiagonal() * (b * b.transpose());
  m.diagonal() += b.rowwise().sum();
  return m;
}

}  // namespace

Eigen::VectorXd trajectory_derivative(const LiftedInstance& inst, const Allocation& x,
                                      const Eigen::VectorXd& entitlements, double condition_limit) {
  if (entitlements.size() != x.size()) throw InputError("entitlement vector length does not match allocation");
  const Eigen::VectorXd s = interior_slacks(inst, x);
  const Eigen::MatrixXd b = scaled_requirements(inst, s);
  Eigen::MatrixXd m = trajectory_matrix(b, x);
  Eigen::VectorXd rhs = entitlements;
  // Row equilibration; does not change the solution.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double scale = m.row(i).cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) throw NumericalError("trajectory system has an empty row");
    m.row(i) /= scale;
    rhs[i] /= scale;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > condition_limit) {
    std::ostringstream os;
    os << "trajectory system is ill-conditioned (condition estimate " << (rcond > 0.0 ? 1.0 / rcond : INFINITY)
       << ")";
    throw NumericalError(os.str());
  }
  Eigen::VectorXd v = lu.solve(rhs);
  const double rate = b.rowwise().sum().dot(v);  // df/dt along v
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    std::ostringstream os;
    os << "trajectory direction does not increase f (df/dt = " << rate << ")";
    throw NumericalError(os.str());
  }
  return v / rate;
}

TrajectoryPoint make_point(const LiftedInstance& inst, double t, const Allocation& x) {
  TrajectoryPoint p;
  p.t = t;
  p.x = x;
  p.slacks = interior_slacks(inst, x);
  p.f_value = -p.slacks.array().log().sum();
  const Eigen::VectorXd raw = inst.requirements * p.slacks.cwiseInverse();
  const double norm = raw.norm();
  p.normal = norm > 0.0 ? Eigen::VectorXd(raw / norm) : raw;
  p.normalization = x.dot(p.normal);
  return p;
}

double normal_alignment_residual(const LiftedInstance& inst, const TrajectoryPoint& p) {
  const double total = inst.entitlements.sum();
  if (!(p.normalization > 0.0) || !(total > 0.0)) return 0.0;
  const double kappa = p.normalization / total;
  const Eigen::VectorXd diff = p.x.cwiseProduct(p.normal) - kappa * inst.entitlements;
  return diff.cwiseAbs().maxCoeff() / kappa;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::BoundaryReached: return "boundary_reached";
    case Termination::TMaxReached: return "t_max_reached";
    case Termination::StepUnderflow: return "step_underflow";
  }
  return "unknown";
}

namespace {

std::optional<Eigen::VectorXd> try_slacks(const LiftedInstance& inst, const Allocation& x) {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(inst.requirements.cols()) - inst.requirements.transpose() * x;
  if (s.size() && !(s.minCoeff() > 0.0)) return std::nullopt;
  return s;
}

struct Residual {
  double level = 0.0;      // |f - t|
  double alignment = 0.0;  // max_i |x_i g_i - c e_i| / c
};

// Newton iteration on (x, c) for  x_i g_i(x) = c e_i  and  f(x) = t.
// Returns nullopt when the corrected point misses the acceptance residuals.
std::optional<Allocation> project(const LiftedInstance& inst, const Eigen::VectorXd& e, double t, Allocation x) {
  const Eigen::Index n = x.size();
  auto s = try_slacks(inst, x);
  if (!s) return std::nullopt;
  double c = x.dot(inst.requirements * s->cwiseInverse()) / e.sum();
  Allocation best = x;
  Residual best_res{INFINITY, INFINITY};
  for (int iter = 0; iter < 10; ++iter) {
    const Eigen::MatrixXd b = scaled_requirements(inst, *s);
    const Eigen::VectorXd g = b.rowwise().sum();
    const double f = -s->array().log().sum();
    Eigen::VectorXd residual(n + 1);
    residual.head(n) = x.cwiseProduct(g) - c * e;
    residual[n] = f - t;
    const double scale = std::max(c, 1e-300);
    Residual res{std::abs(residual[n]), c > 0.0 ? residual.head(n).cwiseAbs().maxCoeff() / scale : 0.0};
    if (res.level + res.alignment < best_res.level + best_res.alignment) {
      best = x;
      best_res = res;
    }
    if (res.level <= 1e-13 * std::max(1.0, t) && res.alignment <= 1e-13) break;

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
    jac.topLeftCorner(n, n) = trajectory_matrix(b, x);
    jac.topRightCorner(n, 1) = -e;
    jac.bottomLeftCorner(1, n) = g.transpose();
    Eigen::VectorXd rhs = -residual;
    for (Eigen::Index i = 0; i <= n; ++i) {
      const double rs = jac.row(i).cwiseAbs().maxCoeff();
      if (rs > 0.0) {
        jac.row(i) /= rs;
        rhs[i] /= rs;
      }
    }
    const Eigen::VectorXd delta = jac.partialPivLu().solve(rhs);
    if (!delta.allFinite()) break;
    double lambda = 1.0;
    std::optional<Eigen::VectorXd> next_s;
    Allocation next;
    for (int k = 0; k < 40; ++k) {
      next = x + lambda * delta.head(n);
      next_s = try_slacks(inst, next);
      if (next_s) break;
      lambda *= 0.5;
    }
    if (!next_s) break;
    x = next;
    s = next_s;
    c += lambda * delta[n];
  }
  // Acceptance bounds leave headroom under the 1e-6 trajectory invariants;
  // near the boundary f is only known to ~eps/min_slack.
  if (best_res.level <= 5e-7 && best_res.alignment <= 5e-7) return best;
  return std::nullopt;
}

// Dormand-Prince 5(4) weights. dx/dt does not depend on t, so no nodes.
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double kB4[7] = {5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

}  // namespace

TrajectoryResult integrate_trajectory(const LiftedInstance& inst, const ToleranceConfig& tol) {
  tol.validate();
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  if (n == 0) throw InputError("cannot integrate a trajectory with no users");
  const Eigen::VectorXd& e = inst.entitlements;
  if (!(e.sum() > 0.0)) throw InputError("trajectory needs a positive total entitlement");

  TrajectoryResult out;
  Allocation x = Allocation::Zero(n);
  double t = 0.0;
  out.points.push_back(make_point(inst, t, x));

  auto deriv = [&](const Allocation& y) { return trajectory_derivative(inst, y, e, tol.condition_limit); };

  double h = tol.initial_step;
  double next_checkpoint = 1.0;
  std::optional<Allocation> last_checkpoint;
  std::vector<Eigen::VectorXd> k(7);

  for (;;) {
    if (t >= tol.t_max) {
      out.termination = Termination::TMaxReached;
      break;
    }
    if (h < tol.min_step) {
      out.termination = Termination::StepUnderflow;
      break;
    }
    const double limit = std::min(tol.t_max, next_checkpoint) - t;
    const bool clipped = h >= limit;
    const double step = clipped ? limit : h;

    Allocation y5;
    double err = 0.0;
    try {
      for (int stage = 0; stage < 7; ++stage) {
        Allocation y = x;
        for (int q = 0; q < stage; ++q) y += step * kA[stage][q] * k[static_cast<std::size_t>(q)];
        k[static_cast<std::size_t>(stage)] = deriv(y);
      }
      y5 = x;
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
      for (int q = 0; q < 7; ++q) {
        y5 += step * kB5[q] * k[static_cast<std::size_t>(q)];
        delta += step * (kB5[q] - kB4[q]) * k[static_cast<std::size_t>(q)];
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = tol.abs_tol + tol.rel_tol * std::max(std::abs(x[i]), std::abs(y5[i]));
        err = std::max(err, std::abs(delta[i]) / sc);
      }
    } catch (const Error&) {
      h = step * 0.5;
      ++out.rejected_steps;
      continue;
    }
    if (!(err <= 1.0)) {
      h = step * (std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2);
      ++out.rejected_steps;
      continue;
    }
    const double t_new = clipped ? std::min(tol.t_max, next_checkpoint) : t + step;
    const auto corrected = project(inst, e, t_new, y5);
    if (!corrected) {
      h = step * 0.5;
      ++out.rejected_steps;
      continue;
    }
    x = *corrected;
    t = t_new;
    ++out.accepted_steps;
    out.points.push_back(make_point(inst, t, x));

    const double grow = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
    h = clipped ? std::max(h, step * grow) : step * grow;

    if (out.points.back().min_slack() <= tol.slack_floor) {
      out.termination = Termination::BoundaryReached;
      break;
    }
    if (clipped && t >= next_checkpoint) {
      if (last_checkpoint && (x - *last_checkpoint).cwiseAbs().maxCoeff() < tol.convergence_tol) {
        out.termination = Termination::Converged;
        break;
      }
      last_checkpoint = x;
      next_checkpoint *= 2.0;
    }
  }
  return out;
}

}  // namespace bbfair
