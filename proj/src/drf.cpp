#include "bbfair/drf.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <limits>

namespace bbfair {

double dominant_demand(const ProblemInstance& inst, std::size_t user) {
  const auto i = static_cast<Eigen::Index>(user);
  if (i >= inst.requirements.rows()) throw InputError("user " + std::to_string(user + 1) + " out of range");
  return inst.requirements.cols() ? std::max(0.0, inst.requirements.row(i).maxCoeff()) : 0.0;
}

double dominant_share(const ProblemInstance& inst, std::size_t user, double x) {
  return x * dominant_demand(inst, user);
}

DrfResult solve_drf(const ProblemInstance& inst) {
  require_valid(inst);
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  const auto& r = inst.requirements;
  const double inf = std::numeric_limits<double>::infinity();

  Eigen::VectorXd d(n), rate = Eigen::VectorXd::Zero(n), cap(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d[i] = dominant_demand(inst, static_cast<std::size_t>(i));
    const double e = inst.entitlements[i];
    if (d[i] > 0.0 && e > 0.0) rate[i] = e / d[i];
    cap[i] = d[i] == 0.0 ? 0.0 : (e > 0.0 ? d[i] / e : inf);
  }
  if (!(d.maxCoeff() > 0.0)) throw InputError("every user has an all-zero requirement profile");

  auto allocation = [&](double s) {
    Allocation x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = d[i] == 0.0 ? 1.0 : std::min(1.0, s * rate[i]);
    return x;
  };

  std::vector<double> breaks;
  for (Eigen::Index i = 0; i < n; ++i)
    if (cap[i] > 0.0 && cap[i] < inf) breaks.push_back(cap[i]);
  std::sort(breaks.begin(), breaks.end());

  DrfResult out;
  double s = inf;
  double lo = 0.0;
  for (std::size_t k = 0; k <= breaks.size() && s == inf; ++k) {
    const double hi = k < breaks.size() ? breaks[k] : inf;
    // On [lo, hi] usage_j(s) = fixed_j + s * slope_j, with users capped at lo fixed.
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      double fixed = 0.0, slope = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (d[i] == 0.0 || cap[i] <= lo) fixed += r(i, j);
        else slope += rate[i] * r(i, j);
      }
      if (slope <= 0.0) continue;
      const double hit = (1.0 - fixed) / slope;
      if (hit <= hi && hit < s) {
        s = std::max(hit, lo);
        out.saturating_resource = static_cast<std::size_t>(j);
      }
    }
    lo = hi;
  }
  if (s == inf) s = breaks.empty() ? 0.0 : breaks.back();

  out.share = s;
  out.x = allocation(s);
  out.dominant_shares = out.x.cwiseProduct(d);
  out.utilizations = usages(r, out.x);
  return out;
}

double average_utilization(const ProblemInstance& inst, const Allocation& x) {
  const Eigen::VectorXd u = usages(inst.requirements, x);
  return u.size() ? u.mean() : 0.0;
}

}  // namespace bbfair
