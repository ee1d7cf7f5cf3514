#pragma once

#include "bbfair/model.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bbfair {

/// Outcome of the no-justified-complaints test for one user.
struct UserStatus {
  enum class Kind { Justified, FullRequest, Complaint };
  Kind kind = Kind::Complaint;
  /// Justifying bottleneck (Justified only).
  std::size_t resource = 0;
  /// Best share x_i r_ij over the bottlenecks; nullopt when there are none.
  std::optional<double> best_bottleneck_share;
  /// Resources where the user does get the entitlement but that are not
  /// bottlenecks (the reason a complaint is justified).
  std::vector<std::size_t> entitled_non_bottlenecks;
};

struct CapacityVerdict {
  bool ok = true;
  std::optional<std::size_t> worst_resource;
  double worst_excess = 0.0;  // max_j usage_j - 1
};

struct EnvyVerdict {
  bool ok = true;
  std::size_t user = 0;
  std::size_t other = 0;
  double margin = 0.0;  // x_user - utility(user, bundle of other)
};

struct ParetoVerdict {
  bool ok = true;
  std::vector<std::size_t> unpinned_users;
};

struct VerificationReport {
  double eps_feasible = 0.0;
  double eps_bottleneck = 0.0;
  double eps_njc = 0.0;

  Allocation x;
  Eigen::VectorXd usage;
  std::vector<std::size_t> bottlenecks;
  CapacityVerdict capacity;
  std::vector<UserStatus> njc;
  ParetoVerdict pareto;
  EnvyVerdict envy;
  Eigen::VectorXd sharing_margins;
  bool sharing_ok = true;

  bool njc_ok() const;
  /// Capacity and NJC gate the verdict; the other attributes are reported.
  bool passed() const { return capacity.ok && njc_ok(); }
};

CapacityVerdict check_capacity(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol);

/// Bottlenecks are resources with usage >= 1 - eps_bottleneck.
std::vector<UserStatus> check_njc(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol);

ParetoVerdict check_pareto(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol);

/// Worst margin over ordered pairs; ok when it is >= -eps_njc.
EnvyVerdict check_envy_free(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol = {});

/// x_i - min over r_ij > 0 of min(1, e_i / r_ij), per user.
Eigen::VectorXd check_sharing_incentive(const ProblemInstance& inst, const Allocation& x);

VerificationReport verify(const ProblemInstance& inst, const Allocation& x, const ToleranceConfig& tol = {});

Solution to_solution(const Allocation& x, const VerificationReport& report);

std::string render_text(const ProblemInstance& inst, const VerificationReport& report);
nlohmann::json to_json(const VerificationReport& report);

}  // namespace bbfair
