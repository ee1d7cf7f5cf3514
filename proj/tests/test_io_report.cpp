#include "doctest.h"

#include "bbfair/errors.hpp"
#include "bbfair/fixtures.hpp"
#include "bbfair/instance_io.hpp"
#include "bbfair/report.hpp"

#include "support.hpp"

#include <string>

using namespace bbfair;
using namespace bbfair::testing;

#ifndef BBFAIR_FIXTURE_DIR
#error "BBFAIR_FIXTURE_DIR must be defined"
#endif

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse_number") {
  using nlohmann::json;
  CHECK(parse_number(json(0.25), "f") == 0.25);
  CHECK(parse_number(json("2/3"), "f") == doctest::Approx(2.0 / 3));
  CHECK(parse_number(json(" 3 / 8 "), "f") == 0.375);
  CHECK(parse_number(json("0.5"), "f") == 0.5);
  CHECK_THROWS_AS(parse_number(json("1/0"), "f"), InputError);
  CHECK_THROWS_AS(parse_number(json("abc"), "f"), InputError);
  CHECK_THROWS_AS(parse_number(json(true), "f"), InputError);
  CHECK_THROWS_AS(parse_number(json(nullptr), "f"), InputError);
}

TEST_CASE("parse_instance") {
  const auto p = parse_instance(R"({"entitlements": ["1/2", 0.5], "requirements": [[1, "1/3"], [0, 1]],
                                    "users": ["a", "b"], "resources": ["cpu", "mem"]})");
  CHECK(p.entitlements == vec({0.5, 0.5}));
  CHECK(p.requirements(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(p.user_names == std::vector<std::string>{"a", "b"});
  CHECK(p.resource_names[1] == "mem");
}

TEST_CASE("parse_instance diagnostics") {
  CHECK(message_of("{\n  \"entitlements\": [1,\n}").find("line 3") != std::string::npos);
  CHECK(message_of("[1, 2]").find("object") != std::string::npos);
  CHECK(message_of(R"({"entitlements": [1]})").find("requirements") != std::string::npos);
  CHECK(message_of(R"({"entitlements": 1, "requirements": [[1]]})").find("'entitlements'") != std::string::npos);
  CHECK(message_of(R"({"entitlements": [0.5, 0.5], "requirements": [[1, 1], [1]]})").find("requirements[1]") !=
        std::string::npos);
  CHECK(message_of(R"({"entitlements": [0.5, "x"], "requirements": [[1], [1]]})").find("entitlements[1]") !=
        std::string::npos);
  CHECK(message_of(R"({"entitlements": [1], "requirements": [[1]], "users": [3]})").find("users[0]") !=
        std::string::npos);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.json"), InputError);
}

TEST_CASE("bundled fixture files match the built-in fixtures") {
  for (const auto& name : fixture_names()) {
    const auto file = load_instance(std::string(BBFAIR_FIXTURE_DIR) + "/" + name + ".json");
    const auto built = fixture(name);
    CHECK(dist(file.entitlements, built.entitlements) <= 1e-15);
    CHECK((file.requirements - built.requirements).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("instance JSON round trip") {
  auto p = fixture("greedy3");
  p.user_names = {"x", "y", "z"};
  const auto q = parse_instance(instance_to_json(p).dump());
  CHECK(q.entitlements == p.entitlements);
  CHECK(q.requirements == p.requirements);
  CHECK(q.user_names == p.user_names);
}

TEST_CASE("parse_allocation") {
  CHECK(parse_allocation("1, 2/3 ,0") == vec({1.0, 2.0 / 3, 0.0}));
  CHECK(parse_allocation("[0.5, \"1/4\"]") == vec({0.5, 0.25}));
  CHECK(parse_allocation(R"({"x": [0.1, 0.2], "verified": true})") == vec({0.1, 0.2}));
  CHECK_THROWS_AS(parse_allocation(""), InputError);
  CHECK_THROWS_AS(parse_allocation("1,,2"), InputError);
  CHECK_THROWS_AS(parse_allocation(R"({"y": [1]})"), InputError);
  CHECK_THROWS_AS(parse_allocation("[1, 2"), InputError);
  CHECK_THROWS_AS(parse_allocation("1,inf"), InputError);
}

TEST_CASE("renormalize_entitlements") {
  auto p = instance({2.0, 6.0}, {{1.0}, {1.0}});
  renormalize_entitlements(p);
  CHECK(p.entitlements == vec({0.25, 0.75}));
  auto z = instance({0.0, 0.0}, {{1.0}, {1.0}});
  CHECK_THROWS_AS(renormalize_entitlements(z), InputError);
}

TEST_CASE("to_fraction and format_exact") {
  const auto f = to_fraction(5.0 / 6);
  REQUIRE(f.has_value());
  CHECK(f->num == 5);
  CHECK(f->den == 6);
  CHECK(format_exact(2.0 / 30) == "1/15");
  CHECK(format_exact(1.0) == "1");
  CHECK(format_exact(0.0) == "0");
  CHECK(format_exact(-0.375) == "-3/8");
  CHECK(format_exact(std::sqrt(2.0)) == format_number(std::sqrt(2.0)));
  CHECK_FALSE(to_fraction(std::nan("")).has_value());
  CHECK(format_number(1.0 / 3) == "0.3333333333");
}

TEST_CASE("solve rendering") {
  const auto inst = fixture("drf_compare");
  const auto r = solve(inst);
  const auto text = render_solve(inst, r, {true, true});
  CHECK(text.find("x = (1/3, 1/3, 5/6)") != std::string::npos);
  CHECK(text.find("a_1 = (1/3, 1/15)") != std::string::npos);
  CHECK(text.find("bottlenecks: {1}") != std::string::npos);
  CHECK(text.find("remove dominated resource 2") != std::string::npos);
  const auto j = solve_to_json(inst, r, {true, false});
  CHECK(j["verified"] == true);
  CHECK(j["x_exact"][2] == "5/6");
  CHECK(j["bottlenecks"] == nlohmann::json::array({1}));
  CHECK(j["justification"][0] == 1);
  CHECK(parse_allocation(j.dump()) == r.solution.allocation);
}

TEST_CASE("comparison report") {
  const auto inst = fixture("drf_compare");
  const auto c = compare(inst);
  const auto j = comparison_to_json(inst, c);
  CHECK(dist(vec({j["drf"]["bundles"][2][0], j["drf"]["bundles"][2][1]}), vec({0.2, 0.4})) <= 1e-12);
  CHECK(dist(vec({j["bbf"]["bundles"][2][0], j["bbf"]["bundles"][2][1]}), vec({1.0 / 3, 2.0 / 3})) <= 1e-9);
  const auto u = fixture("utilization");
  const auto cu = compare(u);
  CHECK(cu.bbf_average == doctest::Approx(0.75));
  CHECK(cu.drf_average == doctest::Approx(0.75));
  const auto text = render_comparison(u, cu, std::size_t{2});
  CHECK(text.find("average utilization: bbf 0.75, drf 0.75 over 4 resources") != std::string::npos);
  CHECK(text.find("tend to 0.5 (bbf) and 0.6666666667 (drf)") != std::string::npos);

  // One resource: both methods give the same allocation.
  const auto one = instance({0.3, 0.7}, {{0.8}, {0.9}});
  const auto co = compare(one);
  CHECK(dist(co.bbf.solution.allocation, co.drf.x) <= 1e-9);
}
