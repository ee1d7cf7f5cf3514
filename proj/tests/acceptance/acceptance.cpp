// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria.
#include "bbfair/drf.hpp"
#include "bbfair/fixtures.hpp"
#include "bbfair/ode_solver.hpp"
#include "bbfair/oracle.hpp"
#include "bbfair/report.hpp"
#include "bbfair/verifier.hpp"

#include "../support.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace bbfair;
using bbfair::testing::dist;
using bbfair::testing::vec;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  if (!c.ok) ++failures;
  std::printf("criterion %2d: %s  %s%s\n", id, c.ok ? "PASS" : "FAIL", title.c_str(), c.detail.str().c_str());
  std::fflush(stdout);
}

std::vector<std::size_t> real_bottlenecks(const ProblemInstance& inst, const Allocation& x) {
  return bottleneck_set(inst, x, ToleranceConfig{});
}

Eigen::VectorXd row(const Eigen::MatrixXd& m, Eigen::Index i) { return m.row(i).transpose(); }

}  // namespace

int main() {
  report(1, "drf_compare bottleneck-fair solution and bundles", [](Check& c) {
    const auto inst = fixture("drf_compare");
    const auto r = solve(inst);
    const auto& x = r.solution.allocation;
    c.expect(r.verified, "verified");
    c.expect(dist(x, vec({1.0 / 3, 1.0 / 3, 5.0 / 6})) <= 1e-5, "x = (1/3, 1/3, 5/6)");
    const Eigen::MatrixXd a = bundles(inst, x);
    c.expect(dist(row(a, 0), vec({1.0 / 3, 2.0 / 30})) <= 1e-5, "a1");
    c.expect(dist(row(a, 1), vec({1.0 / 3, 2.0 / 30})) <= 1e-5, "a2");
    c.expect(dist(row(a, 2), vec({1.0 / 3, 2.0 / 3})) <= 1e-5, "a3");
    c.expect(real_bottlenecks(inst, x) == std::vector<std::size_t>{0}, "resource 1 is the only bottleneck");
  });

  report(2, "drf_compare DRF bundles and dominant shares", [](Check& c) {
    const auto inst = fixture("drf_compare");
    const auto d = solve_drf(inst);
    const Eigen::MatrixXd a = bundles(inst, d.x);
    c.expect(dist(row(a, 0), vec({0.4, 0.08})) <= 1e-9, "a1 = (0.4, 0.08)");
    c.expect(dist(row(a, 1), vec({0.4, 0.08})) <= 1e-9, "a2 = (0.4, 0.08)");
    c.expect(dist(row(a, 2), vec({0.2, 0.4})) <= 1e-9, "a3 = (0.2, 0.4)");
    c.expect(dist(d.dominant_shares, vec({0.4, 0.4, 0.4})) <= 1e-9, "dominant shares 0.4");
  });

  report(3, "utilization example and k-middle averages", [](Check& c) {
    const auto inst = fixture("utilization");
    const auto r = solve(inst);
    c.expect(r.verified && dist(r.solution.allocation, vec({1.0, 0.5})) <= 1e-5, "bbf x = (1, 1/2)");
    const auto d = solve_drf(inst);
    c.expect(dist(d.x, vec({2.0 / 3, 2.0 / 3})) <= 1e-9, "drf x = (2/3, 2/3)");
    double prev_b = 1.0, prev_d = 1.0;
    for (std::size_t k : {2, 10, 50}) {
      const auto cmp = compare(utilization_instance(k));
      const double gb = std::abs(cmp.bbf_average - kBbfUtilizationLimit);
      const double gd = std::abs(cmp.drf_average - kDrfUtilizationLimit);
      c.expect(gb < prev_b && gd < prev_d, "averages approach the limits at k=" + std::to_string(k));
      prev_b = gb;
      prev_d = gd;
      if (k == 50) {
        c.expect(gb <= 0.02, "bbf average within 0.02 of 1/2 at k=50");
        c.expect(gd <= 0.02, "drf average within 0.02 of 2/3 at k=50");
      }
    }
  });

  report(4, "slope2 uniqueness and N=2 grid agreement", [](Check& c) {
    const auto inst = fixture("slope2");
    const auto r = solve(inst);
    c.expect(dist(r.solution.allocation, vec({0.6, 0.9})) <= 1e-5, "solve = (0.6, 0.9)");
    c.expect(enumerate_solutions(inst).witnesses.size() == 1, "exactly one witness");
    int misses = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto p = random_instance(40000 + s, 2, 1 + s % 4);
      const auto x = solve(p).solution.allocation;
      if (!grid_search_n2(p, 1e-4).brackets(x, 2.0)) ++misses;
    }
    c.expect(misses == 0, std::to_string(misses) + " of 100 random instances outside the grid bracket");
  });

  report(5, "nonunique_n3 family (z, 1-z, 1-z)", [](Check& c) {
    const auto inst = fixture("nonunique_n3");
    const auto r = solve(inst);
    const auto& x = r.solution.allocation;
    const double z = x[0];
    c.expect(std::abs(x[1] - (1 - z)) <= 1e-5 && std::abs(x[2] - (1 - z)) <= 1e-5, "x = (z, 1-z, 1-z)");
    c.expect(z >= 0.5 - 1e-5 && z <= 0.7 + 1e-5, "0.5 <= z <= 0.7");
    c.expect(verify(inst, x).passed(), "verify passes");
    const auto fam = enumerate_solutions(inst);
    c.expect(fam.distance_to_witness(vec({0.5, 0.5, 0.5})) <= 1e-7, "witness z = 0.5");
    c.expect(fam.distance_to_witness(vec({0.7, 0.3, 0.3})) <= 1e-7, "witness z = 0.7");
    c.expect(fam.has_family(), "family flagged");
  });

  report(6, "circle4 solutions", [](Check& c) {
    const auto inst = fixture("circle4");
    const double t = 1.0 / 3;
    c.expect(verify(inst, vec({t, t, t, t})).passed(), "(1/3, 1/3, 1/3, 1/3)");
    int patterns = 0;
    for (int k = 0; k < 4; ++k) {
      for (int l = k + 1; l < 4; ++l) {
        Allocation x = Allocation::Constant(4, 0.25);
        x[k] = x[l] = 0.375;
        ++patterns;
        c.expect(verify(inst, x).passed(), "pattern 0.375 at users " + std::to_string(k + 1) + "," + std::to_string(l + 1));
      }
    }
    c.expect(patterns == 6, "six patterns");
    c.expect(enumerate_solutions(inst).witnesses.size() >= 7, "at least 7 witnesses");
    c.expect(solve(inst).verified, "solver output verifies");
  });

  report(7, "greedy3 complaints", [](Check& c) {
    const auto inst = fixture("greedy3");
    const auto bad = verify(inst, vec({1.0, 2.0 / 3, 0.0}));
    c.expect(!bad.passed(), "(1, 2/3, 0) rejected");
    const auto& u2 = bad.njc[1];
    c.expect(u2.kind == UserStatus::Kind::Complaint, "user 2 complains");
    c.expect(std::find(u2.entitled_non_bottlenecks.begin(), u2.entitled_non_bottlenecks.end(), 1) !=
                 u2.entitled_non_bottlenecks.end(),
             "complaint names resource 2 as non-bottleneck");
    const auto mid = verify(inst, vec({0.75, 1.0, 0.0}));
    c.expect(mid.njc[0].kind != UserStatus::Kind::Complaint && mid.njc[1].kind != UserStatus::Kind::Complaint,
             "users 1 and 2 justified at (3/4, 1, 0)");
    c.expect(mid.njc[2].kind == UserStatus::Kind::Complaint, "user 3 complains at (3/4, 1, 0)");
    const auto r = solve(inst);
    bool all = r.verified;
    for (const auto& s : r.report.njc) all = all && s.kind != UserStatus::Kind::Complaint;
    c.expect(all, "full solve justifies all three users");
  });

  report(8, "trajectory invariants on 200 random instances", [](Check& c) {
    std::mt19937_64 rng(8);
    double worst_f = 0.0, worst_align = 0.0, worst_grad = 0.0;
    bool interior = true;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto p = random_instance(80000 + s, 1 + s % 5, 1 + (s / 5) % 5);
      const auto r = solve(p);
      const auto& red = r.trace.final;
      for (const auto& pt : r.trajectory) {
        worst_f = std::max(worst_f, std::abs(pt.f_value - pt.t));
        interior = interior && pt.min_slack() > 0.0;
        worst_align = std::max(worst_align, normal_alignment_residual(red, pt));
      }
      const auto lifted = add_dummy_resources(p);
      for (int k = 0; k < 3; ++k) {
        const Allocation x = testing::interior_point(lifted, rng, 0.5 + 0.2 * k);
        const Eigen::VectorXd g = gradient(lifted, x).raw;
        const Eigen::VectorXd fd = testing::fd_gradient(lifted, x);
        worst_grad = std::max(worst_grad, (g - fd).lpNorm<Eigen::Infinity>() / g.lpNorm<Eigen::Infinity>());
      }
    }
    c.detail << " |f-t| " << worst_f << ", alignment " << worst_align << ", gradient " << worst_grad;
    c.expect(worst_f <= 1e-6, "|f - t| <= 1e-6");
    c.expect(interior, "strictly interior");
    c.expect(worst_align <= 1e-6, "normal alignment <= 1e-6");
    c.expect(worst_grad <= 1e-5, "gradient vs finite differences <= 1e-5");
  });

  report(9, "fairness axioms on the random suite", [](Check& c) {
    int envy = 0;
    bool ok = true, sharing = true;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const auto p = random_instance(80000 + s, 1 + s % 5, 1 + (s / 5) % 5);
      const auto r = solve(p);
      const auto& rep = r.report;
      ok = ok && rep.capacity.ok && rep.njc_ok() && rep.pareto.ok;
      sharing = sharing && rep.sharing_margins.minCoeff() >= -1e-6;
      if (rep.envy.margin < -1e-6) ++envy;
    }
    c.expect(ok, "capacity, NJC and Pareto");
    c.expect(sharing, "sharing-incentive margins >= -1e-6");
    c.detail << " envy findings: " << envy << " of 200";
  });

  report(10, "oracle cross-validation on fixtures", [](Check& c) {
    ToleranceConfig strict;
    strict.eps_bottleneck = 1e-7;
    strict.eps_njc = 1e-7;
    for (const auto& name : fixture_names()) {
      const auto inst = fixture(name);
      if (inst.num_users() > 4) continue;
      const auto fam = enumerate_solutions(inst);
      const auto x = solve(inst).solution.allocation;
      c.expect(fam.distance_to_witness(x) <= 1e-5 || fam.on_family_face(inst, x, 1e-5), name + " solution matches");
      for (const auto& w : fam.witnesses) c.expect(verify(inst, w.x, strict).passed(), name + " witness verifies");
    }
  });

  return failures;
}
