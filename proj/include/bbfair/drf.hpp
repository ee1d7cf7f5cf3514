#pragma once

#include "bbfair/model.hpp"

#include <optional>

namespace bbfair {

struct DrfResult {
  Allocation x;
  double share = 0.0;                    // common normalized share s
  Eigen::VectorXd dominant_shares;       // x_i d_i
  std::optional<std::size_t> saturating_resource;
  Eigen::VectorXd utilizations;          // per real resource
};

/// d_i = max_j r_ij over the real resources.
double dominant_demand(const ProblemInstance& inst, std::size_t user);

/// x_i d_i; 0 for an all-zero profile.
double dominant_share(const ProblemInstance& inst, std::size_t user, double x);

/// Weighted DRF under fixed proportions: x_i = min(1, s e_i / d_i) for the
/// largest s keeping every usage <= 1. Users with d_i = 0 get x_i = 1.
/// Throws InputError when every d_i is zero.
DrfResult solve_drf(const ProblemInstance& inst);

/// Mean of the per-resource usages at x.
double average_utilization(const ProblemInstance& inst, const Allocation& x);

}  // namespace bbfair
