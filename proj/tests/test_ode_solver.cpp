#include "doctest.h"

#include "bbfair/errors.hpp"
#include "bbfair/fixtures.hpp"
#include "bbfair/ode_solver.hpp"
#include "bbfair/oracle.hpp"

#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace bbfair;
using namespace bbfair::testing;

namespace {

LiftedInstance slope2_lifted() { return add_dummy_resources(fixture("slope2")); }

}  // namespace

TEST_CASE("level_value") {
  const auto l = slope2_lifted();
  CHECK(level_value(l, vec({0.0, 0.0})) == 0.0);
  CHECK(level_value(l, vec({0.3, 0.3})) == doctest::Approx(-(std::log(0.6) + 2 * std::log(0.7))));
  CHECK(level_value(l, vec({0.3, 0.3})) == doctest::Approx(1.22417).epsilon(1e-5));
  CHECK_THROWS_AS(level_value(l, vec({0.6, 0.9})), DomainError);
  try {
    level_value(l, vec({1.0, 0.1}));
  } catch (const DomainError& e) {
    CHECK(e.resource() == 1);
    CHECK(std::string(e.what()).find("dummy(user 1)") != std::string::npos);
  }
  CHECK_THROWS_AS(level_value(l, vec({0.1})), InputError);
}

TEST_CASE("gradient") {
  const auto l = slope2_lifted();
  const auto g0 = gradient(l, vec({0.0, 0.0}));
  CHECK(g0.raw[0] == doctest::Approx(2.0 / 3 + 1.0));
  CHECK(g0.unit.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto g = gradient(l, vec({0.3, 0.3}));
  CHECK(g.raw[0] == doctest::Approx(2.0 / 3 / 0.6 + 1 / 0.7));
  CHECK(g.raw[0] == doctest::Approx(g.raw[1]));
  CHECK_THROWS_AS(gradient(l, vec({0.6, 0.9})), DomainError);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(17);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto lifted = add_dummy_resources(random_instance(300 + s, 1 + s % 5, 1 + s % 4));
    for (int k = 0; k < 5; ++k) {
      const Allocation x = interior_point(lifted, rng, 0.3 + 0.12 * k);
      const Eigen::VectorXd g = gradient(lifted, x).raw;
      CHECK(dist(g, fd_gradient(lifted, x)) / g.lpNorm<Eigen::Infinity>() <= 1e-5);
    }
  }
}

TEST_CASE("trajectory_derivative") {
  const auto l = add_dummy_resources(instance({0.5, 0.5}, {{2.0 / 3}, {2.0 / 3}}));
  const Eigen::VectorXd v = trajectory_derivative(l, vec({0.1, 0.1}), l.entitlements);
  CHECK(v[0] == doctest::Approx(v[1]));

  // At the origin the direction is e_i / sum_j r_ij up to the df/dt = 1 scaling.
  const auto g = add_dummy_resources(fixture("greedy3"));
  const Eigen::VectorXd v0 = trajectory_derivative(g, Allocation::Zero(3), g.entitlements);
  const Eigen::VectorXd raw = g.entitlements.cwiseQuotient(g.requirements.rowwise().sum());
  CHECK(dist(v0 / v0.norm(), raw / raw.norm()) <= 1e-12);
  CHECK(gradient(g, Allocation::Zero(3)).raw.dot(v0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(trajectory_derivative(g, vec({1.0, 1.0, 1.0}), g.entitlements), DomainError);
}

TEST_CASE("trajectory_derivative raises df/dt at unit rate") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = random_instance(600 + s, 2 + s % 3, 1 + s % 3);
    const auto red = preprocess(p).final;
    if (red.num_users() == 0) continue;
    const auto traj = integrate_trajectory(red);
    for (std::size_t k = 1; k < traj.points.size(); k += 7) {
      const auto& pt = traj.points[k];
      const Eigen::VectorXd v = trajectory_derivative(red, pt.x, red.entitlements);
      const double h = 1e-6;
      const double df = level_value(red, pt.x + h * v) - level_value(red, pt.x);
      CHECK(df == doctest::Approx(h).epsilon(1e-3));
    }
  }
}

TEST_CASE("integrate_trajectory endpoints and invariants") {
  SUBCASE("slope2") {
    const auto red = preprocess(fixture("slope2")).final;
    const auto t = integrate_trajectory(red);
    CHECK(dist(t.points.back().x, vec({0.6, 0.9})) <= 1e-5);
    CHECK(t.points.front().t == 0.0);
    CHECK(t.points.front().x.isZero());
    CHECK(t.accepted_steps > 0);
  }
  SUBCASE("comparison example") {
    const auto red = preprocess(fixture("drf_compare")).final;
    const auto t = integrate_trajectory(red);
    CHECK(dist(t.points.back().x, vec({1.0 / 3, 1.0 / 3, 5.0 / 6})) <= 1e-5);
  }
  SUBCASE("points stay on the level set, inside, normal aligned") {
    for (const auto& name : fixture_names()) {
      const auto red = preprocess(fixture(name)).final;
      if (red.num_users() == 0) continue;
      const auto t = integrate_trajectory(red);
      double prev_slack = 1.0;
      for (const auto& p : t.points) {
        CHECK(std::abs(p.f_value - p.t) <= 1e-6);
        CHECK(p.min_slack() > 0.0);
        CHECK(std::abs(p.normal.norm() - 1.0) <= 1e-12);
        CHECK(normal_alignment_residual(red, p) <= 1e-6);
        if (p.t >= 1.0) {
          CHECK(p.min_slack() <= prev_slack * (1 + 1e-9));
          prev_slack = p.min_slack();
        }
      }
    }
  }
  SUBCASE("short horizon") {
    ToleranceConfig tol;
    tol.t_max = 2.0;
    const auto t = integrate_trajectory(preprocess(fixture("greedy3")).final, tol);
    CHECK(t.termination == Termination::TMaxReached);
    CHECK(t.points.back().t == doctest::Approx(2.0));
  }
}

TEST_CASE("solve examples") {
  SUBCASE("comparison example") {
    const auto r = solve(fixture("drf_compare"));
    CHECK(r.verified);
    CHECK(r.polish_applied);
    const Eigen::MatrixXd a = bundles(fixture("drf_compare"), r.solution.allocation);
    CHECK(dist(a.row(0).transpose(), vec({1.0 / 3, 2.0 / 30})) <= 1e-9);
    CHECK(dist(a.row(2).transpose(), vec({1.0 / 3, 2.0 / 3})) <= 1e-9);
  }
  SUBCASE("utilization example") {
    const auto r = solve(fixture("utilization"));
    CHECK(dist(r.solution.allocation, vec({1.0, 0.5})) <= 1e-9);
    const Eigen::MatrixXd a = bundles(fixture("utilization"), r.solution.allocation);
    CHECK(dist(a.row(0).transpose(), vec({0.5, 0.0, 0.0, 1.0})) <= 1e-9);
    CHECK(dist(a.row(1).transpose(), vec({0.5, 0.5, 0.5, 0.0})) <= 1e-9);
  }
  SUBCASE("family example") {
    const auto r = solve(fixture("nonunique_n3"));
    const double z = r.solution.allocation[0];
    CHECK(r.verified);
    CHECK(z >= 0.5 - 1e-9);
    CHECK(z <= 0.7 + 1e-9);
  }
  SUBCASE("everything eliminated") {
    const auto r = solve(instance({1.0}, {{0.5}}));
    CHECK(r.verified);
    CHECK(r.solution.allocation == vec({1.0}));
    CHECK(r.termination == Termination::Converged);
  }
  SUBCASE("zero-entitlement residual") {
    const auto r = solve(instance({0.0, 0.0, 1.0}, {{1.0, 0.5}, {0.5, 1.0}, {0.2, 0.2}}));
    CHECK(r.verified);
  }
  SUBCASE("without dominated removal") {
    for (const auto& name : fixture_names()) CHECK(solve(fixture(name), {}, SolveOptions{false, false}).verified);
  }
  SUBCASE("invalid input") {
    CHECK_THROWS_AS(solve(instance({0.7, 0.7}, {{1.0}, {1.0}})), InputError);
    ToleranceConfig bad;
    bad.eps_njc = -1;
    CHECK_THROWS_AS(solve(fixture("slope2"), bad), InputError);
  }
}

TEST_CASE("polish snaps a near-boundary point") {
  const auto red = preprocess(fixture("slope2")).final;
  const auto p = polish(red, vec({0.6 - 1e-7, 0.9 - 1e-7}), {});
  REQUIRE(p.has_value());
  CHECK(dist(p->x, vec({0.6, 0.9})) <= 1e-12);
  CHECK(p->distance <= 1e-6);
  CHECK_FALSE(polish(red, vec({0.1, 0.1}), {}).has_value());
}

TEST_CASE("trajectory CSV") {
  const auto r = solve(fixture("slope2"));
  const auto csv = trajectory_csv(r.trace, r.trajectory, 5);
  std::istringstream in(csv);
  std::string header, first, line, last;
  std::getline(in, header);
  CHECK(header == "t,x_1,x_2,f,min_slack");
  std::getline(in, first);
  CHECK(first == "0,0,0,0,1");
  std::size_t rows = 1;
  while (std::getline(in, line)) {
    last = line;
    ++rows;
  }
  CHECK(rows == (r.trajectory.size() + 4) / 5 + ((r.trajectory.size() - 1) % 5 != 0 ? 1 : 0));
  CHECK(last.find("0.6") != std::string::npos);

  // Eliminated users appear at 1.
  const auto e = solve(fixture("elim_example"));
  const auto csv2 = trajectory_csv(e.trace, e.trajectory);
  CHECK(csv2.substr(0, csv2.find('\n')) == "t,x_1,x_2,x_3,f,min_slack");
  CHECK(csv2.find("\n0,1,0,0,0,1\n") != std::string::npos);
}

TEST_CASE("termination names") {
  CHECK(to_string(Termination::Converged) == "converged");
  CHECK(to_string(Termination::BoundaryReached) == "boundary_reached");
  CHECK(to_string(Termination::TMaxReached) == "t_max_reached");
  CHECK(to_string(Termination::StepUnderflow) == "step_underflow");
}
