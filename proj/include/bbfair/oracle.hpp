#pragma once

#include "bbfair/lp.hpp"
#include "bbfair/model.hpp"

#include "json.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bbfair {

/// A candidate bottleneck set together with a justification for every user.
struct FeasibilityQuery {
  static constexpr std::size_t kFullRequest = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> bottlenecks;    // real resources held at usage 1
  std::vector<std::size_t> justification;  // per user: a member of bottlenecks, or kFullRequest

  /// usage_j = 1 on the bottlenecks, usage_j <= 1 elsewhere,
  /// x_i r_ij(i) >= e_i (or x_i = 1), 0 <= x <= 1.
  lp::LinearProgram program(const ProblemInstance& inst) const;

  /// Largest constraint violation of x against program(inst).
  double violation(const ProblemInstance& inst, const Allocation& x) const;
};

struct Witness {
  Allocation x;
  std::vector<std::size_t> bottlenecks;  // J(x) at the verifier's default tolerance
  FeasibilityQuery query;                // first query that produced x
  bool on_family = false;                // produced by a query with a positive-dimension face
};

struct SolutionFamily {
  std::vector<Witness> witnesses;
  /// Feasible queries whose solution set is more than a single point.
  std::vector<FeasibilityQuery> families;
  /// Some two distinct witnesses have identical bottleneck sets.
  bool shared_bottleneck_sets = false;
  std::size_t queries_solved = 0;

  bool has_family() const { return !families.empty(); }
  /// Distance to the nearest witness (infinity if there are none).
  double distance_to_witness(const Allocation& x) const;
  /// x satisfies some flagged family query within tol.
  bool on_family_face(const ProblemInstance& inst, const Allocation& x, double tol) const;
};

inline constexpr std::size_t kEnumerationLimit = 6;

/// Enumerates (bottleneck subset, justification) pairs and solves each LP.
/// Every feasible pair contributes the point with the largest common slack on
/// its non-binding constraints and the two points extremizing sum_i x_i.
/// Throws SizeGuardError when N or m exceeds kEnumerationLimit.
SolutionFamily enumerate_solutions(const ProblemInstance& inst, const ToleranceConfig& tol = {});

struct GridSearchResult {
  double resolution = 0.0;
  std::vector<Allocation> points;  // verified points on the boundary curve
  double lo = 0.0;                 // smallest and largest x_1 among points
  double hi = 0.0;

  bool empty() const { return points.empty(); }
  /// x_1 lies within `cells` grid cells of [lo, hi].
  bool brackets(const Allocation& x, double cells = 2.0) const;
};

/// Walks x_1 over a uniform grid with x_2 on the upper boundary of the
/// feasible region and keeps the points that pass verification with the
/// bottleneck and complaint tolerances relaxed to one grid cell.
GridSearchResult grid_search_n2(const ProblemInstance& inst, double resolution = 1e-4);

struct RandomOptions {
  bool ensure_column_sums = true;  // rescale columns with sum < 1 up to sum 1
};

/// Deterministic instance: positive normalized entitlements, requirements
/// uniform in [0, 1].
ProblemInstance random_instance(std::uint64_t seed, std::size_t users, std::size_t resources,
                                const RandomOptions& params = {});

std::string render_family(const ProblemInstance& inst, const SolutionFamily& family);
nlohmann::json to_json(const SolutionFamily& family);

}  // namespace bbfair
