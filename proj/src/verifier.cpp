#include "bbfair/verifier.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace bbfair {

namespace {

void check_dimensions(const ProblemInstance& inst, const Allocation& x) {
  if (static_cast<std::size_t>(x.size()) != inst.num_users())
    throw InputError("allocation has " + std::to_string(x.size()) + " entries for " +
                     std::to_string(inst.num_users()) + " users");
}

std::vector<std::size_t> detect_bottlenecks(const Eigen::VectorXd& usage, double eps_bottleneck) {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < usage.size(); ++j)
    if (usage[j] >= 1.0 - eps_bottleneck) out.push_back(static_cast<std::size_t>(j));
  return out;
}

}  // namespace

bool VerificationReport::njc_ok() const {
  return std::none_of(njc.begin(), njc.end(), [](const UserStatus& s) { return s.kind == UserStatus::Kind::Complaint; });
}

CapacityVerdict check_capacity(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol) {
  check_dimensions(inst, x);
  const Eigen::VectorXd u = usages(inst.requirements, x);
  CapacityVerdict v;
  if (u.size() == 0) return v;
  Eigen::Index worst = 0;
  v.worst_excess = u.maxCoeff(&worst) - 1.0;
  v.ok = v.worst_excess <= tol.eps_feasible;
  if (!v.ok) v.worst_resource = static_cast<std::size_t>(worst);
  return v;
}

std::vector<UserStatus> check_njc(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol) {
  check_dimensions(inst, x);
  const Eigen::VectorXd u = usages(inst.requirements, x);
  const auto J = detect_bottlenecks(u, tol.eps_bottleneck);
  std::vector<UserStatus> out;
  for (std::size_t i = 0; i < inst.num_users(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double e = inst.entitlements[ii];
    UserStatus s;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto j : J) {
      const double share = x[ii] * inst.requirements(ii, static_cast<Eigen::Index>(j));
      if (share > best) {
        best = share;
        s.resource = j;
      }
    }
    if (!J.empty()) s.best_bottleneck_share = best;
    if (!J.empty() && best >= e - tol.eps_njc) {
      s.kind = UserStatus::Kind::Justified;
    } else if (x[ii] >= 1.0 - tol.eps_njc) {
      s.kind = UserStatus::Kind::FullRequest;
    } else {
      s.kind = UserStatus::Kind::Complaint;
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        if (u[j] >= 1.0 - tol.eps_bottleneck) continue;
        if (x[ii] * inst.requirements(ii, j) >= e - tol.eps_njc) s.entitled_non_bottlenecks.push_back(static_cast<std::size_t>(j));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

ParetoVerdict check_pareto(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol) {
  check_dimensions(inst, x);
  const Eigen::VectorXd u = usages(inst.requirements, x);
  ParetoVerdict v;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] >= 1.0 - tol.eps_njc) continue;
    bool pinned = false;
    for (Eigen::Index j = 0; j < u.size() && !pinned; ++j)
      pinned = inst.requirements(i, j) > 0.0 && 1.0 - u[j] <= tol.eps_bottleneck;
    if (!pinned) v.unpinned_users.push_back(static_cast<std::size_t>(i));
  }
  v.ok = v.unpinned_users.empty();
  return v;
}

EnvyVerdict check_envy_free(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol) {
  check_dimensions(inst, x);
  EnvyVerdict v;
  bool first = true;
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (i == k) continue;
      const Eigen::VectorXd bundle = x[k] * inst.requirements.row(k).transpose();
      const double margin = x[i] - utility(inst, static_cast<std::size_t>(i), bundle);
      if (first || margin < v.margin) {
        v = {true, static_cast<std::size_t>(i), static_cast<std::size_t>(k), margin};
        first = false;
      }
    }
  }
  v.ok = v.margin >= -tol.eps_njc;
  return v;
}

Eigen::VectorXd check_sharing_incentive(const ProblemInstance& inst, const Allocation& x) {
  check_dimensions(inst, x);
  Eigen::VectorXd margins(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double baseline = 1.0;
    for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) {
      const double r = inst.requirements(i, j);
      if (r > 0.0) baseline = std::min(baseline, std::min(1.0, inst.entitlements[i] / r));
    }
    margins[i] = x[i] - baseline;
  }
  return margins;
}

VerificationReport verify(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol) {
  check_dimensions(inst, x);
  VerificationReport r;
  r.eps_feasible = tol.eps_feasible;
  r.eps_bottleneck = tol.eps_bottleneck;
  r.eps_njc = tol.eps_njc;
  r.x = x;
  r.usage = usages(inst.requirements, x);
  r.bottlenecks = detect_bottlenecks(r.usage, tol.eps_bottleneck);
  r.capacity = check_capacity(inst, x, tol);
  r.njc = check_njc(inst, x, tol);
  r.pareto = check_pareto(inst, x, tol);
  r.envy = check_envy_free(inst, x, tol);
  r.sharing_margins = check_sharing_incentive(inst, x);
  r.sharing_ok = r.sharing_margins.size() == 0 || r.sharing_margins.minCoeff() >= -tol.eps_njc;
  return r;
}

Solution to_solution(const Allocation& x, const VerificationReport& report) {
  Solution s;
  s.allocation = x;
  s.bottlenecks = report.bottlenecks;
  s.slacks = Eigen::VectorXd::Ones(report.usage.size()) - report.usage;
  for (const auto& st : report.njc) {
    switch (st.kind) {
      case UserStatus::Kind::Justified: s.justification.push_back({Justification::Kind::Resource, st.resource}); break;
      case UserStatus::Kind::FullRequest: s.justification.push_back({Justification::Kind::FullRequest, 0}); break;
      case UserStatus::Kind::Complaint: s.justification.push_back({Justification::Kind::None, 0}); break;
    }
  }
  return s;
}

namespace {

std::string resource_label(const ProblemInstance& inst, std::size_t j) {
  std::string s = std::to_string(j + 1);
  if (j < inst.resource_names.size()) s += " (" + inst.resource_names[j] + ")";
  return s;
}

std::string user_label(const ProblemInstance& inst, std::size_t i) {
  std::string s = std::to_string(i + 1);
  if (i < inst.user_names.size()) s += " (" + inst.user_names[i] + ")";
  return s;
}

}  // namespace

std::string render_text(const ProblemInstance& inst, const VerificationReport& r) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "verdict: " << (r.passed() ? "PASS" : "FAIL") << "\n";
  os << "tolerances: feasible " << r.eps_feasible << ", bottleneck " << r.eps_bottleneck << ", njc " << r.eps_njc
     << "\n";
  os << "x:";
  for (Eigen::Index i = 0; i < r.x.size(); ++i) os << " " << r.x[i];
  os << "\nusage:";
  for (Eigen::Index j = 0; j < r.usage.size(); ++j) os << " " << r.usage[j];
  os << "\nbottlenecks: {";
  for (std::size_t k = 0; k < r.bottlenecks.size(); ++k) os << (k ? ", " : "") << r.bottlenecks[k] + 1;
  os << "}\n";
  os << "capacity: " << (r.capacity.ok ? "ok" : "VIOLATED");
  if (r.capacity.worst_resource)
    os << " (resource " << resource_label(inst, *r.capacity.worst_resource) << " over by " << r.capacity.worst_excess
       << ")";
  os << "\n";
  for (std::size_t i = 0; i < r.njc.size(); ++i) {
    const auto& s = r.njc[i];
    os << "user " << user_label(inst, i) << ": ";
    switch (s.kind) {
      case UserStatus::Kind::Justified:
        os << "justified by bottleneck " << resource_label(inst, s.resource) << " (share "
           << *s.best_bottleneck_share << " >= entitlement " << inst.entitlements[static_cast<Eigen::Index>(i)]
           << ")";
        break;
      case UserStatus::Kind::FullRequest: os << "receives full request (x = " << r.x[static_cast<Eigen::Index>(i)] << ")"; break;
      case UserStatus::Kind::Complaint:
        os << "COMPLAINT (entitlement " << inst.entitlements[static_cast<Eigen::Index>(i)];
        if (s.best_bottleneck_share) os << ", best bottleneck share " << *s.best_bottleneck_share;
        else os << ", no bottleneck resources";
        os << ")";
        for (const auto j : s.entitled_non_bottlenecks)
          os << "; gets entitlement on resource " << resource_label(inst, j) << " which is not a bottleneck";
        break;
    }
    os << "\n";
  }
  os << "pareto: " << (r.pareto.ok ? "ok" : "not pinned:");
  for (const auto i : r.pareto.unpinned_users) os << " user " << i + 1;
  os << "\nenvy: worst margin " << r.envy.margin;
  if (r.x.size() > 1) os << " (user " << r.envy.user + 1 << " vs bundle of user " << r.envy.other + 1 << ")";
  os << (r.envy.ok ? "" : " ENVY") << "\n";
  os << "sharing incentive margins:";
  for (Eigen::Index i = 0; i < r.sharing_margins.size(); ++i) os << " " << r.sharing_margins[i];
  os << (r.sharing_ok ? "" : " VIOLATED") << "\n";
  return os.str();
}

nlohmann::json to_json(const VerificationReport& r) {
  using nlohmann::json;
  auto one_based = [](const std::vector<std::size_t>& v) {
    json a = json::array();
    for (auto k : v) a.push_back(k + 1);
    return a;
  };
  json users = json::array();
  for (std::size_t i = 0; i < r.njc.size(); ++i) {
    const auto& s = r.njc[i];
    json u;
    u["user"] = i + 1;
    switch (s.kind) {
      case UserStatus::Kind::Justified:
        u["status"] = "justified";
        u["resource"] = s.resource + 1;
        break;
      case UserStatus::Kind::FullRequest: u["status"] = "full_request"; break;
      case UserStatus::Kind::Complaint:
        u["status"] = "complaint";
        u["entitled_non_bottlenecks"] = one_based(s.entitled_non_bottlenecks);
        break;
    }
    u["best_bottleneck_share"] = s.best_bottleneck_share ? json(*s.best_bottleneck_share) : json(nullptr);
    users.push_back(std::move(u));
  }
  json j;
  j["pass"] = r.passed();
  j["tolerances"] = {{"eps_feasible", r.eps_feasible}, {"eps_bottleneck", r.eps_bottleneck}, {"eps_njc", r.eps_njc}};
  j["x"] = std::vector<double>(r.x.data(), r.x.data() + r.x.size());
  j["usage"] = std::vector<double>(r.usage.data(), r.usage.data() + r.usage.size());
  j["bottlenecks"] = one_based(r.bottlenecks);
  j["capacity"] = {{"ok", r.capacity.ok},
                   {"worst_resource", r.capacity.worst_resource ? json(*r.capacity.worst_resource + 1) : json(nullptr)},
                   {"worst_excess", r.capacity.worst_excess}};
  j["njc"] = std::move(users);
  j["pareto"] = {{"ok", r.pareto.ok}, {"unpinned_users", one_based(r.pareto.unpinned_users)}};
  j["envy"] = {{"ok", r.envy.ok}, {"user", r.envy.user + 1}, {"other", r.envy.other + 1}, {"margin", r.envy.margin}};
  j["sharing_incentive"] = {
      {"ok", r.sharing_ok},
      {"margins", std::vector<double>(r.sharing_margins.data(), r.sharing_margins.data() + r.sharing_margins.size())}};
  return j;
}

}  // namespace bbfair
