#include "bbfair/oracle.hpp"

#include "bbfair/errors.hpp"
#include "bbfair/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

namespace bbfair {

namespace {

bool contains(const std::vector<std::size_t>& v, std::size_t k) { return std::find(v.begin(), v.end(), k) != v.end(); }

Eigen::VectorXd unit(Eigen::Index n, Eigen::Index k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[k] = 1.0;
  return v;
}

// Same constraints as program() with one extra variable delta that must fit
// under every non-binding constraint (capacity off the bottlenecks, x_i <= 1
// for users not at their full request).
lp::LinearProgram slack_program(const ProblemInstance& inst, const FeasibilityQuery& q) {
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  auto base = q.program(inst);
  auto p = lp::LinearProgram::with_box(static_cast<std::size_t>(n) + 1, 0.0, 1.0);
  p.lower[n] = -1.0;
  p.objective[n] = 1.0;
  for (auto& c : base.constraints) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row.head(n) = c.coefficients;
    p.add(row, c.relation, c.rhs);
  }
  for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) {
    if (contains(q.bottlenecks, static_cast<std::size_t>(j))) continue;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n + 1);
    row.head(n) = inst.requirements.col(j);
    row[n] = 1.0;
    p.add(row, lp::Relation::LessEqual, 1.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q.justification[static_cast<std::size_t>(i)] == FeasibilityQuery::kFullRequest) continue;
    Eigen::VectorXd row = unit(n + 1, i);
    row[n] = 1.0;
    p.add(row, lp::Relation::LessEqual, 1.0);
  }
  return p;
}

// Justification choices per user: bottlenecks it can draw its entitlement
// from, then the full request.
std::vector<std::vector<std::size_t>> options(const ProblemInstance& inst, const std::vector<std::size_t>& subset) {
  std::vector<std::vector<std::size_t>> out(inst.num_users());
  for (std::size_t i = 0; i < inst.num_users(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double e = inst.entitlements[ii];
    for (const auto j : subset) {
      const double r = inst.requirements(ii, static_cast<Eigen::Index>(j));
      if (e > 0.0 ? r >= e : true) out[i].push_back(j);
    }
    out[i].push_back(FeasibilityQuery::kFullRequest);
  }
  return out;
}

void add_witness(SolutionFamily& family, const ProblemInstance& inst, const Allocation& raw,
                 const FeasibilityQuery& q, bool on_family) {
  const Allocation x = raw.cwiseMax(0.0).cwiseMin(1.0);
  for (auto& w : family.witnesses) {
    if ((w.x - x).lpNorm<Eigen::Infinity>() <= 1e-7) {
      w.on_family = w.on_family || on_family;
      return;
    }
  }
  ToleranceConfig tol;
  family.witnesses.push_back(Witness{x, bottleneck_set(inst, x, tol), q, on_family});
}

}  // namespace

lp::LinearProgram FeasibilityQuery::program(const ProblemInstance& inst) const {
  const auto n = static_cast<Eigen::Index>(inst.num_users());
  if (justification.size() != static_cast<std::size_t>(n))
    throw InputError("justification assignment has " + std::to_string(justification.size()) + " entries for " +
                     std::to_string(n) + " users");
  auto p = lp::LinearProgram::with_box(static_cast<std::size_t>(n), 0.0, 1.0);
  for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j) {
    const bool binding = contains(bottlenecks, static_cast<std::size_t>(j));
    p.add(inst.requirements.col(j), binding ? lp::Relation::Equal : lp::Relation::LessEqual, 1.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = justification[static_cast<std::size_t>(i)];
    if (j == kFullRequest) {
      p.add(unit(n, i), lp::Relation::Equal, 1.0);
    } else {
      if (!contains(bottlenecks, j)) throw InputError("user " + std::to_string(i + 1) + " justified by a non-bottleneck");
      p.add(unit(n, i) * inst.requirements(i, static_cast<Eigen::Index>(j)), lp::Relation::GreaterEqual,
            inst.entitlements[i]);
    }
  }
  return p;
}

double FeasibilityQuery::violation(const ProblemInstance& inst, const Allocation& x) const {
  return lp::max_violation(program(inst), x);
}

double SolutionFamily::distance_to_witness(const Allocation& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : witnesses)
    if (w.x.size() == x.size()) best = std::min(best, (w.x - x).lpNorm<Eigen::Infinity>());
  return best;
}

bool SolutionFamily::on_family_face(const ProblemInstance& inst, const Allocation& x, double tol) const {
  return std::any_of(families.begin(), families.end(),
                     [&](const FeasibilityQuery& q) { return q.violation(inst, x) <= tol; });
}

SolutionFamily enumerate_solutions(const ProblemInstance& inst, const ToleranceConfig& tol) {
  require_valid(inst, tol.eps_input);
  const std::size_t n = inst.num_users();
  const std::size_t m = inst.num_resources();
  if (n > kEnumerationLimit || m > kEnumerationLimit)
    throw SizeGuardError("enumeration is limited to " + std::to_string(kEnumerationLimit) + " users and " +
                         std::to_string(kEnumerationLimit) + " resources (got " + std::to_string(n) + " x " +
                         std::to_string(m) + ")");

  // Subsets ordered by size, then lexicographically.
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (std::size_t{1} << j)) s.push_back(j);
    subsets.push_back(std::move(s));
  }
  std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });

  SolutionFamily family;
  for (const auto& subset : subsets) {
    // Skip the whole subset when the bottleneck equalities alone are infeasible.
    {
      auto p = lp::LinearProgram::with_box(n, 0.0, 1.0);
      for (const auto j : subset)
        p.add(inst.requirements.col(static_cast<Eigen::Index>(j)), lp::Relation::Equal, 1.0);
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(m); ++j)
        if (!contains(subset, static_cast<std::size_t>(j)))
          p.add(inst.requirements.col(j), lp::Relation::LessEqual, 1.0);
      if (!lp::feasible(p.constraints, p.lower, p.upper)) continue;
    }
    const auto choice = options(inst, subset);
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      FeasibilityQuery q{subset, {}};
      for (std::size_t i = 0; i < n; ++i) q.justification.push_back(choice[i][pick[i]]);

      const auto centre = lp::maximize(slack_program(inst, q));
      ++family.queries_solved;
      if (centre.optimal()) {
        auto p = q.program(inst);
        p.objective.setOnes();
        const auto hi = lp::maximize(p);
        p.objective = -p.objective;
        const auto lo = lp::maximize(p);
        const Allocation mid = centre.x.head(static_cast<Eigen::Index>(n));
        bool face = false;
        for (const auto* r : {&hi, &lo})
          if (r->optimal() && (r->x - mid).lpNorm<Eigen::Infinity>() > 1e-7) face = true;
        if (face) family.families.push_back(q);
        add_witness(family, inst, mid, q, face);
        for (const auto* r : {&hi, &lo})
          if (r->optimal()) add_witness(family, inst, r->x, q, face);
      }

      std::size_t k = 0;
      while (k < n && ++pick[k] == choice[k].size()) pick[k++] = 0;
      if (k == n) break;
    }
  }

  for (std::size_t a = 0; a < family.witnesses.size(); ++a)
    for (std::size_t b = a + 1; b < family.witnesses.size(); ++b)
      if (family.witnesses[a].bottlenecks == family.witnesses[b].bottlenecks) family.shared_bottleneck_sets = true;
  return family;
}

bool GridSearchResult::brackets(const Allocation& x, double cells) const {
  if (points.empty() || x.size() < 1) return false;
  return x[0] >= lo - cells * resolution && x[0] <= hi + cells * resolution;
}

GridSearchResult grid_search_n2(const ProblemInstance& inst, double resolution) {
  if (inst.num_users() != 2) throw InputError("grid search needs exactly 2 users");
  if (!(resolution > 0.0 && resolution <= 0.5)) throw InputError("grid resolution must lie in (0, 0.5]");
  ToleranceConfig tol;
  tol.eps_bottleneck = resolution;
  tol.eps_njc = resolution;
  tol.eps_feasible = std::min(tol.eps_feasible, resolution);

  GridSearchResult out;
  out.resolution = resolution;
  const auto steps = static_cast<long>(std::llround(1.0 / resolution));
  for (long k = 0; k <= steps; ++k) {
    const double x1 = std::min(1.0, static_cast<double>(k) * resolution);
    double x2 = 1.0;
    for (Eigen::Index j = 0; j < inst.requirements.cols(); ++j)
      if (inst.requirements(1, j) > 0.0) x2 = std::min(x2, (1.0 - x1 * inst.requirements(0, j)) / inst.requirements(1, j));
    if (x2 < 0.0) break;
    Allocation x(2);
    x << x1, x2;
    try {
      if (!verify(inst, x, tol).passed()) continue;
    } catch (const InfeasibleAllocation&) {
      continue;
    }
    if (out.points.empty()) out.lo = x1;
    out.hi = x1;
    out.points.push_back(std::move(x));
  }
  return out;
}

ProblemInstance random_instance(std::uint64_t seed, std::size_t users, std::size_t resources, const RandomOptions& params) {
  if (users == 0 || resources == 0) throw InputError("random instance needs at least one user and one resource");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> share(0.05, 1.0);
  std::uniform_real_distribution<double> demand(0.0, 1.0);
  ProblemInstance p;
  const auto n = static_cast<Eigen::Index>(users);
  const auto m = static_cast<Eigen::Index>(resources);
  p.entitlements.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.entitlements[i] = share(rng);
  p.entitlements /= p.entitlements.sum();
  p.requirements.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) p.requirements(i, j) = demand(rng);
  if (params.ensure_column_sums) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double s = p.requirements.col(j).sum();
      if (s <= 0.0) p.requirements.col(j).setConstant(1.0 / static_cast<double>(n));
      else if (s < 1.0) p.requirements.col(j) /= s;
    }
  }
  return p;
}

std::string render_family(const ProblemInstance& inst, const SolutionFamily& family) {
  (void)inst;
  std::ostringstream os;
  os << std::setprecision(10);
  os << "witnesses: " << family.witnesses.size() << " (from " << family.queries_solved << " queries)\n";
  os << "family: " << (family.has_family() ? "positive-dimension solution set found" : "none found") << "\n";
  os << "shared bottleneck sets: " << (family.shared_bottleneck_sets ? "yes" : "no") << "\n";
  std::size_t k = 0;
  for (const auto& w : family.witnesses) {
    os << "#" << ++k << " x = (";
    for (Eigen::Index i = 0; i < w.x.size(); ++i) os << (i ? ", " : "") << w.x[i];
    os << ")  J = {";
    for (std::size_t b = 0; b < w.bottlenecks.size(); ++b) os << (b ? ", " : "") << w.bottlenecks[b] + 1;
    os << "}  justification:";
    for (std::size_t i = 0; i < w.query.justification.size(); ++i) {
      const auto j = w.query.justification[i];
      os << " " << i + 1 << "->";
      if (j == FeasibilityQuery::kFullRequest) os << "full";
      else os << j + 1;
    }
    if (w.on_family) os << "  [family]";
    os << "\n";
  }
  return os.str();
}

nlohmann::json to_json(const SolutionFamily& family) {
  using nlohmann::json;
  json ws = json::array();
  for (const auto& w : family.witnesses) {
    json just = json::array();
    for (const auto j : w.query.justification)
      just.push_back(j == FeasibilityQuery::kFullRequest ? json("full") : json(j + 1));
    json b = json::array();
    for (const auto j : w.bottlenecks) b.push_back(j + 1);
    json qb = json::array();
    for (const auto j : w.query.bottlenecks) qb.push_back(j + 1);
    ws.push_back({{"x", std::vector<double>(w.x.data(), w.x.data() + w.x.size())},
                  {"bottlenecks", b},
                  {"query_bottlenecks", qb},
                  {"justification", just},
                  {"family", w.on_family}});
  }
  return {{"witnesses", ws},
          {"family", family.has_family()},
          {"family_queries", family.families.size()},
          {"shared_bottleneck_sets", family.shared_bottleneck_sets},
          {"queries_solved", family.queries_solved}};
}

}  // namespace bbfair
