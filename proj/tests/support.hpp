#pragma once

#include "bbfair/model.hpp"
#include "bbfair/ode_solver.hpp"
#include "bbfair/preprocess.hpp"

#include <random>

namespace bbfair::testing {

inline Allocation vec(std::initializer_list<double> v) {
  Allocation x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double d : v) x[k++] = d;
  return x;
}

inline ProblemInstance instance(std::initializer_list<double> e, std::initializer_list<std::initializer_list<double>> r) {
  ProblemInstance p;
  p.entitlements = vec(e);
  p.requirements.resize(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double d : row) p.requirements(i, j++) = d;
    ++i;
  }
  return p;
}

inline double dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).lpNorm<Eigen::Infinity>(); }

/// Uniform random direction scaled so the largest column usage is `level`.
inline Allocation interior_point(const LiftedInstance& inst, std::mt19937_64& rng, double level = 0.9) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Allocation x(static_cast<Eigen::Index>(inst.num_users()));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
  const double peak = (inst.requirements.transpose() * x).maxCoeff();
  return x * (level / peak);
}

/// Central-difference gradient of the barrier value.
inline Eigen::VectorXd fd_gradient(const LiftedInstance& inst, const Allocation& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Allocation a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (level_value(inst, a) - level_value(inst, b)) / (2 * h);
  }
  return g;
}

}  // namespace bbfair::testing
