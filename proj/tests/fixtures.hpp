#pragma once

#include <random>

#include "adtdesign/model.hpp"

namespace fixtures {

inline adt::DegradationModel table1() {
  adt::Vector beta(4);
  beta << 2.397, 1.018, 1.629, 0.0696;
  return adt::DegradationModel::affine(beta, {0.114, 0.105, -0.143}, 0.048, -0.056, 3.912);
}

inline adt::ApproximateDesign tau0() {
  return adt::ApproximateDesign::uniform({0.0, 0.05, 0.10, 0.90, 0.95, 1.0});
}

// Random affine model whose median lies beyond the test window by `t_lo`..`t_hi`.
inline adt::DegradationModel random_affine(std::mt19937_64& rng, double t_lo = 1.1,
                                           double t_hi = 6.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  adt::Vector beta(4);
  beta << 1.0 + u(rng), 0.5 + u(rng), 0.5 + u(rng), 0.2 * (u(rng) - 0.5);
  const double xu = -0.5 * u(rng);
  const adt::RandomLineCovariance cov{0.05 + 0.2 * u(rng), 0.05 + 0.2 * u(rng),
                                      -0.9 + 1.8 * u(rng)};
  const double sigma_eps = 0.01 + 0.1 * u(rng);
  auto m = adt::DegradationModel::affine(beta, cov, sigma_eps, xu, 10.0);
  const double d1 = beta[0] + beta[2] * xu;
  const double d2 = beta[1] + beta[3] * xu;
  const double t = t_lo + (t_hi - t_lo) * u(rng);
  return m.with_y0(d1 + d2 * t);
}

inline adt::Matrix random_spd(std::mt19937_64& rng, int n, double ridge = 0.1) {
  std::normal_distribution<double> g(0.0, 1.0);
  adt::Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() + ridge * adt::Matrix::Identity(n, n);
}

}  // namespace fixtures
