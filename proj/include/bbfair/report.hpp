#pragma once

#include "bbfair/drf.hpp"
#include "bbfair/ode_solver.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace bbfair {

struct Fraction {
  long long num = 0;
  long long den = 1;
};

/// Best continued-fraction approximation with denominator <= max_den, if it
/// is within tol of v.
std::optional<Fraction> to_fraction(double v, long long max_den = 10000, double tol = 1e-9);

/// "p/q" when v has a small rational form, otherwise 10 significant digits.
std::string format_exact(double v);
std::string format_number(double v);

struct RenderOptions {
  bool exact = false;
  bool trace_reductions = false;
};

std::string render_solve(const ProblemInstance& inst, const SolveResult& result, const RenderOptions& opts = {});
nlohmann::json solve_to_json(const ProblemInstance& inst, const SolveResult& result, const RenderOptions& opts = {});

struct Comparison {
  SolveResult bbf;
  DrfResult drf;
  Eigen::VectorXd bbf_dominant_shares;
  Eigen::VectorXd bbf_utilizations;
  double bbf_average = 0.0;
  double drf_average = 0.0;
};

Comparison compare(const ProblemInstance& inst, const ToleranceConfig& tol = {});

/// Limits of the average utilization on the k-middle utilization instance
/// as k grows: 1/2 for the bottleneck-fair solution, 2/3 for DRF.
inline constexpr double kBbfUtilizationLimit = 0.5;
inline constexpr double kDrfUtilizationLimit = 2.0 / 3.0;

std::string render_comparison(const ProblemInstance& inst, const Comparison& c, std::optional<std::size_t> middles = {});
nlohmann::json comparison_to_json(const ProblemInstance& inst, const Comparison& c,
                                  std::optional<std::size_t> middles = {});

}  // namespace bbfair
