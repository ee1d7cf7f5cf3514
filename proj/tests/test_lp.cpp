#include "doctest.h"

#include "bbfair/errors.hpp"
#include "bbfair/lp.hpp"

#include "support.hpp"

#include <random>

using namespace bbfair;
using namespace bbfair::lp;
using bbfair::testing::vec;

TEST_CASE("maximize on a single constraint") {
  auto p = LinearProgram::with_box(2, 0.0, 1.0);
  p.objective = vec({1.0, 1.0});
  p.add(vec({1.0, 1.0}), Relation::LessEqual, 1.0);
  const auto r = maximize(p);
  REQUIRE(r.optimal());
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(max_violation(p, r.x) <= 1e-9);
}

TEST_CASE("domination LP from the comparison example") {
  auto p = LinearProgram::with_box(3, 0.0, 1.0);
  p.objective = vec({0.2, 0.2, 0.8});
  p.add(vec({1.0, 1.0, 0.4}), Relation::LessEqual, 1.0);
  const auto r = maximize(p);
  REQUIRE(r.optimal());
  CHECK(r.value == doctest::Approx(0.92).epsilon(1e-12));
  CHECK(r.x[2] == doctest::Approx(1.0));
  CHECK(r.x[0] + r.x[1] == doctest::Approx(0.6));
}

TEST_CASE("infeasible and unbounded are outcomes") {
  auto p = LinearProgram::with_box(1, 0.0, 1.0);
  p.objective = vec({1.0});
  p.add(vec({1.0}), Relation::GreaterEqual, 2.0);
  CHECK(maximize(p).status == Status::Infeasible);

  auto q = LinearProgram::with_box(1);
  q.objective = vec({1.0});
  CHECK(maximize(q).status == Status::Unbounded);

  auto e = LinearProgram::with_box(1, 0.0, 1.0);
  e.add(vec({1.0}), Relation::Equal, 0.3);
  e.add(vec({1.0}), Relation::Equal, 0.4);
  CHECK_FALSE(feasible(e.constraints, e.lower, e.upper).has_value());
}

TEST_CASE("feasible returns a witness") {
  auto p = LinearProgram::with_box(3, 0.0, 1.0);
  const auto w = feasible(p.constraints, p.lower, p.upper);
  REQUIRE(w.has_value());
  CHECK(w->size() == 3);
  CHECK(max_violation(p, *w) == 0.0);

  // Both resources binding, users 1 and 2 justified on them.
  auto q = LinearProgram::with_box(3, 0.0, 1.0);
  q.add(vec({1.0, 0.0, 1.0}), Relation::Equal, 1.0);
  q.add(vec({1.0, 1.0, 0.0}), Relation::Equal, 1.0);
  q.add(vec({1.0, 0.0, 0.0}), Relation::GreaterEqual, 0.5);
  q.add(vec({0.0, 1.0, 0.0}), Relation::GreaterEqual, 0.3);
  q.add(vec({0.0, 0.0, 1.0}), Relation::GreaterEqual, 0.2);
  const auto v = feasible(q.constraints, q.lower, q.upper);
  REQUIRE(v.has_value());
  CHECK(max_violation(q, *v) <= 1e-9);
  CHECK((*v)[0] >= 0.5 - 1e-9);
  CHECK((*v)[0] <= 0.7 + 1e-9);
}

TEST_CASE("equality and lower bounds") {
  auto p = LinearProgram::with_box(2, -1.0, 2.0);
  p.objective = vec({-1.0, 1.0});
  p.add(vec({1.0, 1.0}), Relation::Equal, 1.0);
  const auto r = maximize(p);
  REQUIRE(r.optimal());
  CHECK(r.x[0] == doctest::Approx(-1.0));
  CHECK(r.x[1] == doctest::Approx(2.0));
  CHECK(r.value == doctest::Approx(3.0));
}

TEST_CASE("redundant equalities") {
  auto p = LinearProgram::with_box(2, 0.0, 1.0);
  p.objective = vec({1.0, 0.0});
  p.add(vec({1.0, 1.0}), Relation::Equal, 1.0);
  p.add(vec({2.0, 2.0}), Relation::Equal, 2.0);
  const auto r = maximize(p);
  REQUIRE(r.optimal());
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("degenerate problem terminates") {
  // Many constraints through the same vertex.
  auto p = LinearProgram::with_box(3, 0.0, 1.0);
  p.objective = vec({1.0, 1.0, 1.0});
  for (int k = 1; k <= 6; ++k) p.add(vec({1.0 * k, 1.0, 1.0}), Relation::LessEqual, 1.0);
  p.add(vec({1.0, 1.0, 1.0}), Relation::LessEqual, 1.0);
  const auto r = maximize(p);
  REQUIRE(r.optimal());
  CHECK(r.value == doctest::Approx(1.0));
}

TEST_CASE("validate rejects malformed programs") {
  auto p = LinearProgram::with_box(2);
  p.add(vec({1.0}), Relation::LessEqual, 1.0);
  CHECK_THROWS_AS(p.validate(), InputError);
  auto q = LinearProgram::with_box(2, 1.0, 0.0);
  CHECK_THROWS_AS(q.validate(), InputError);
  auto r = LinearProgram::with_box(1);
  r.lower[0] = -std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(r.validate(), InputError);
  CHECK_THROWS_AS(maximize(q), InputError);
}

// Brute-force optimum of a 3-variable LP with box [0,1]^3 and <= rows:
// intersect every triple of active planes.
namespace {

std::optional<double> vertex_enumeration(const LinearProgram& p) {
  std::vector<std::pair<Eigen::Vector3d, double>> planes;
  for (const auto& c : p.constraints) planes.push_back({c.coefficients, c.rhs});
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    u[i] = 1.0;
    planes.push_back({u, 0.0});
    planes.push_back({u, 1.0});
  }
  std::optional<double> best;
  for (std::size_t a = 0; a < planes.size(); ++a)
    for (std::size_t b = a + 1; b < planes.size(); ++b)
      for (std::size_t c = b + 1; c < planes.size(); ++c) {
        Eigen::Matrix3d m;
        m.row(0) = planes[a].first;
        m.row(1) = planes[b].first;
        m.row(2) = planes[c].first;
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Eigen::Vector3d x = m.fullPivLu().solve(Eigen::Vector3d(planes[a].second, planes[b].second, planes[c].second));
        if (max_violation(p, x) > 1e-10) continue;
        const double v = p.objective.dot(x);
        if (!best || v > *best) best = v;
      }
  return best;
}

}  // namespace

TEST_CASE("agrees with vertex enumeration on random 3-variable problems") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = LinearProgram::with_box(3, 0.0, 1.0);
    p.objective = vec({u(rng), u(rng), u(rng)});
    const int rows = 1 + trial % 5;
    for (int k = 0; k < rows; ++k) p.add(vec({u(rng), u(rng), u(rng)}), Relation::LessEqual, pos(rng) * 0.8);
    const auto r = maximize(p);
    const auto oracle = vertex_enumeration(p);
    REQUIRE(oracle.has_value());  // origin is always feasible
    REQUIRE(r.optimal());
    CHECK(r.value == doctest::Approx(*oracle).epsilon(1e-8));
    CHECK(max_violation(p, r.x) <= 1e-9);
    CHECK(p.objective.dot(r.x) == doctest::Approx(r.value).epsilon(1e-12));
  }
}
