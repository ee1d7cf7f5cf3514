#include "bbfair/lp.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bbfair::lp {

LinearProgram LinearProgram::with_box(std::size_t n, double lo, double hi) {
  LinearProgram p;
  const auto size = static_cast<Eigen::Index>(n);
  p.objective = Eigen::VectorXd::Zero(size);
  p.lower = Eigen::VectorXd::Constant(size, lo);
  p.upper = Eigen::VectorXd::Constant(size, hi);
  return p;
}

LinearProgram& LinearProgram::add(Eigen::VectorXd coefficients, Relation relation, double rhs) {
  constraints.push_back({std::move(coefficients), relation, rhs});
  return *this;
}

void LinearProgram::validate() const {
  const auto n = objective.size();
  if (lower.size() != n || upper.size() != n) throw InputError("lp: bound vectors do not match the objective");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(lower[i])) throw InputError("lp: lower bounds must be finite");
    if (lower[i] > upper[i]) throw InputError("lp: lower bound exceeds upper bound");
  }
  for (const auto& c : constraints)
    if (c.coefficients.size() != n) throw InputError("lp: constraint length does not match the objective");
}

double max_violation(const LinearProgram& program, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    worst = std::max(worst, program.lower[i] - x[i]);
    worst = std::max(worst, x[i] - program.upper[i]);
  }
  for (const auto& c : program.constraints) {
    const double lhs = c.coefficients.dot(x);
    switch (c.relation) {
      case Relation::LessEqual: worst = std::max(worst, lhs - c.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, c.rhs - lhs); break;
      case Relation::Equal: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
    }
  }
  return worst;
}

namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kCostEps = 1e-11;
constexpr double kPhaseOneEps = 1e-9;

// Row-major tableau in canonical form with respect to `basis`. The last
// column holds the right-hand side.
struct Tableau {
  Eigen::MatrixXd a;
  std::vector<Eigen::Index> basis;
  Eigen::Index num_cols = 0;  // excluding rhs

  double& rhs(Eigen::Index row) { return a(row, num_cols); }

  void pivot(Eigen::Index row, Eigen::Index col) {
    a.row(row) /= a(row, col);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (r == row) continue;
      const double factor = a(r, col);
      if (factor != 0.0) a.row(r) -= factor * a.row(row);
      a(r, col) = 0.0;
    }
    a(row, col) = 1.0;
    basis[static_cast<std::size_t>(row)] = col;
  }
};

enum class RunStatus { Optimal, Unbounded };

// Maximizes cost . y over the columns with allowed[col] set.
RunStatus run(Tableau& t, const Eigen::VectorXd& cost, const std::vector<bool>& allowed) {
  const Eigen::Index rows = t.a.rows();
  // Reduced costs d_j = c_B . A_j - c_j; optimal when all d_j >= 0.
  auto reduced = [&](Eigen::Index col) {
    double d = -cost[col];
    for (Eigen::Index r = 0; r < rows; ++r) d += cost[t.basis[static_cast<std::size_t>(r)]] * t.a(r, col);
    return d;
  };
  for (;;) {
    Eigen::Index entering = -1;
    for (Eigen::Index col = 0; col < t.num_cols; ++col) {
      if (!allowed[static_cast<std::size_t>(col)]) continue;
      if (std::find(t.basis.begin(), t.basis.end(), col) != t.basis.end()) continue;
      if (reduced(col) < -kCostEps) {
        entering = col;
        break;
      }
    }
    if (entering < 0) return RunStatus::Optimal;

    Eigen::Index leaving = -1;
    double best_ratio = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double coef = t.a(r, entering);
      if (coef <= kPivotEps) continue;
      const double ratio = t.rhs(r) / coef;
      if (leaving < 0 || ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 &&
           t.basis[static_cast<std::size_t>(r)] < t.basis[static_cast<std::size_t>(leaving)])) {
        leaving = r;
        best_ratio = ratio;
      }
    }
    if (leaving < 0) return RunStatus::Unbounded;
    t.pivot(leaving, entering);
    for (Eigen::Index r = 0; r < rows; ++r)
      if (t.rhs(r) < 0.0 && t.rhs(r) > -1e-13) t.rhs(r) = 0.0;
  }
}

struct StandardForm {
  Tableau tableau;
  Eigen::Index num_structural = 0;
  Eigen::Index first_artificial = 0;
};

StandardForm build(const LinearProgram& p) {
  const Eigen::Index n = p.objective.size();
  struct Row {
    Eigen::VectorXd coef;
    Relation rel;
    double rhs;
  };
  std::vector<Row> rows;
  // Shift x = lower + y so that y >= 0.
  for (const auto& c : p.constraints) rows.push_back({c.coefficients, c.relation, c.rhs - c.coefficients.dot(p.lower)});
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(p.upper[i])) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = 1.0;
      rows.push_back({e, Relation::LessEqual, p.upper[i] - p.lower[i]});
    }
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      r.coef = -r.coef;
      r.rhs = -r.rhs;
      if (r.rel == Relation::LessEqual) r.rel = Relation::GreaterEqual;
      else if (r.rel == Relation::GreaterEqual) r.rel = Relation::LessEqual;
    }
  }
  Eigen::Index slack_count = 0;
  Eigen::Index artificial_count = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::Equal) ++slack_count;
    if (r.rel != Relation::LessEqual) ++artificial_count;
  }
  StandardForm sf;
  sf.num_structural = n;
  sf.first_artificial = n + slack_count;
  auto& t = sf.tableau;
  t.num_cols = n + slack_count + artificial_count;
  t.a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), t.num_cols + 1);
  t.basis.assign(rows.size(), 0);
  Eigen::Index slack = n;
  Eigen::Index art = sf.first_artificial;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    t.a.row(r).head(n) = rows[k].coef.transpose();
    t.rhs(r) = rows[k].rhs;
    switch (rows[k].rel) {
      case Relation::LessEqual:
        t.a(r, slack) = 1.0;
        t.basis[k] = slack++;
        break;
      case Relation::GreaterEqual:
        t.a(r, slack++) = -1.0;
        t.a(r, art) = 1.0;
        t.basis[k] = art++;
        break;
      case Relation::Equal:
        t.a(r, art) = 1.0;
        t.basis[k] = art++;
        break;
    }
  }
  return sf;
}

// Runs phase one; returns false when the system is infeasible. On success the
// tableau holds a basis free of artificial columns (redundant rows removed).
bool phase_one(StandardForm& sf) {
  auto& t = sf.tableau;
  if (sf.first_artificial == t.num_cols) return true;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(t.num_cols);
  cost.tail(t.num_cols - sf.first_artificial).setConstant(-1.0);
  std::vector<bool> allowed(static_cast<std::size_t>(t.num_cols), true);
  run(t, cost, allowed);
  double infeasibility = 0.0;
  double scale = 1.0;
  for (Eigen::Index r = 0; r < t.a.rows(); ++r) {
    scale = std::max(scale, std::abs(t.rhs(r)));
    if (t.basis[static_cast<std::size_t>(r)] >= sf.first_artificial) infeasibility += t.rhs(r);
  }
  if (infeasibility > kPhaseOneEps * scale) return false;

  // Drive remaining (zero-level) artificials out of the basis.
  std::vector<Eigen::Index> redundant;
  for (Eigen::Index r = 0; r < t.a.rows(); ++r) {
    if (t.basis[static_cast<std::size_t>(r)] < sf.first_artificial) continue;
    Eigen::Index col = -1;
    double best = kPivotEps * 100;
    for (Eigen::Index c = 0; c < sf.first_artificial; ++c) {
      if (std::abs(t.a(r, c)) > best) {
        best = std::abs(t.a(r, c));
        col = c;
      }
    }
    if (col >= 0) t.pivot(r, col);
    else redundant.push_back(r);
  }
  if (!redundant.empty()) {
    Eigen::MatrixXd kept(t.a.rows() - static_cast<Eigen::Index>(redundant.size()), t.a.cols());
    std::vector<Eigen::Index> basis;
    Eigen::Index out = 0;
    for (Eigen::Index r = 0; r < t.a.rows(); ++r) {
      if (std::find(redundant.begin(), redundant.end(), r) != redundant.end()) continue;
      kept.row(out++) = t.a.row(r);
      basis.push_back(t.basis[static_cast<std::size_t>(r)]);
    }
    t.a = std::move(kept);
    t.basis = std::move(basis);
  }
  return true;
}

Eigen::VectorXd extract(const StandardForm& sf, const LinearProgram& p) {
  const auto& t = sf.tableau;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(sf.num_structural);
  for (Eigen::Index r = 0; r < t.a.rows(); ++r) {
    const Eigen::Index col = t.basis[static_cast<std::size_t>(r)];
    if (col < sf.num_structural) y[col] = std::max(0.0, t.a(r, t.num_cols));
  }
  Eigen::VectorXd x = p.lower + y;
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::min(x[i], p.upper[i]);
  return x;
}

}  // namespace

Result maximize(const LinearProgram& program) {
  program.validate();
  StandardForm sf = build(program);
  Result result;
  if (!phase_one(sf)) {
    result.status = Status::Infeasible;
    return result;
  }
  auto& t = sf.tableau;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(t.num_cols);
  cost.head(sf.num_structural) = program.objective;
  std::vector<bool> allowed(static_cast<std::size_t>(t.num_cols), false);
  for (Eigen::Index c = 0; c < sf.first_artificial; ++c) allowed[static_cast<std::size_t>(c)] = true;
  if (run(t, cost, allowed) == RunStatus::Unbounded) {
    result.status = Status::Unbounded;
    return result;
  }
  result.status = Status::Optimal;
  result.x = extract(sf, program);
  result.value = program.objective.dot(result.x);
  return result;
}

std::optional<Eigen::VectorXd> feasible(const std::vector<LinearConstraint>& constraints,
                                        const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  LinearProgram p;
  p.objective = Eigen::VectorXd::Zero(lower.size());
  p.constraints = constraints;
  p.lower = lower;
  p.upper = upper;
  p.validate();
  StandardForm sf = build(p);
  if (!phase_one(sf)) return std::nullopt;
  return extract(sf, p);
}

}  // namespace bbfair::lp
