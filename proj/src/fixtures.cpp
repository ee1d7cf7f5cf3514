#include "bbfair/fixtures.hpp"

#include "bbfair/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace bbfair {

namespace {

ProblemInstance make(std::vector<double> e, std::vector<std::vector<double>> r) {
  ProblemInstance p;
  p.entitlements = Eigen::Map<Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size()));
  p.requirements.resize(static_cast<Eigen::Index>(r.size()), r.empty() ? 0 : static_cast<Eigen::Index>(r[0].size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r[i].size(); ++j)
      p.requirements(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[i][j];
  return p;
}

const std::map<std::string, std::function<ProblemInstance()>>& registry() {
  static const std::map<std::string, std::function<ProblemInstance()>> table{
      {"greedy3",
       [] {
         return make({1.0 / 2, 3.0 / 8, 1.0 / 8},
                     {{1.0 / 2, 1.0 / 2, 2.0 / 3}, {1.0 / 2, 5.0 / 8, 1.0 / 2}, {1.0, 1.0, 1.0 / 3}});
       }},
      {"drf_compare", [] { return make({1.0 / 3, 1.0 / 3, 1.0 / 3}, {{1.0, 0.2}, {1.0, 0.2}, {0.4, 0.8}}); }},
      {"utilization", [] { return utilization_instance(2); }},
      {"slope2", [] { return make({0.4, 0.6}, {{2.0 / 3}, {2.0 / 3}}); }},
      {"nonunique_n3", [] { return make({0.5, 0.3, 0.2}, {{1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}); }},
      {"circle4",
       [] {
         return make({0.25, 0.25, 0.25, 0.25},
                     {{1, 1, 0, 1}, {1, 1, 1, 0}, {0, 1, 1, 1}, {1, 0, 1, 1}});
       }},
      {"elim_example", [] { return make({0.5, 0.2, 0.3}, {{0.4, 0.3}, {0.5, 0.6}, {0.5, 0.5}}); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

bool has_fixture(const std::string& name) { return registry().count(name) != 0; }

ProblemInstance fixture(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw InputError("unknown fixture '" + name + "'");
  return it->second();
}

ProblemInstance utilization_instance(std::size_t middles) {
  const auto m = static_cast<Eigen::Index>(middles + 2);
  ProblemInstance p;
  p.entitlements = Eigen::VectorXd::Constant(2, 0.5);
  p.requirements = Eigen::MatrixXd::Zero(2, m);
  p.requirements(0, 0) = 0.5;
  p.requirements(0, m - 1) = 1.0;
  p.requirements.row(1).head(m - 1).setOnes();
  return p;
}

}  // namespace bbfair
