#pragma once

#include <string>
#include <vector>

#include "adtdesign/model.hpp"

namespace adt {

/// Equidistant grid {0, 1/J, ..., 1} with at most one of k measurements per
/// grid point and unit, i.e. a weight cap of 1/k.
struct GridSpec {
  int J = 20;
  int k = 6;

  void validate(int p2) const;
  std::vector<double> points() const;
  double cap() const { return 1.0 / k; }
};

struct OptimizerConfig {
  int max_iters = 100000;
  double tol = 1e-7;
  /// Exponent lambda of the multiplicative update pi_j <- pi_j * phi_j^lambda.
  double damping = 0.5;

  void validate() const;
};

/// Constrained equivalence-theorem diagnostics. The sensitivity phi(t_j) is
/// normalized so that its design-weighted mean is 1; at an optimum there is
/// a threshold eta with phi >= eta on saturated points, phi == eta on
/// interior points and phi <= eta on zero-weight points.
struct OptimalityCertificate {
  double max_violation = 0.0;
  double threshold = 0.0;
  bool certified = false;
  std::vector<std::size_t> saturated_set;
  std::vector<std::size_t> interior_set;
  std::vector<std::size_t> zero_set;
  std::vector<double> sensitivity;

  /// One letter per grid point: 'S' saturated, 'I' interior, 'Z' zero.
  std::string pattern() const;
};

struct TimePlan {
  ApproximateDesign design;  // weights on every grid point, zeros included
  OptimalityCertificate certificate;
  double criterion_fixed = 0.0;
  int iterations = 0;
  /// criterion_fixed after each update, starting with the uniform design.
  std::vector<double> history;
};

/// Weights on a candidate grid minimizing c^T M(pi)^-1 c with
/// M(pi) = sum_j pi_j g_j g_j^T subject to 0 <= pi_j <= cap, sum pi_j = 1.
/// Rows of `regressors` are the g_j. Generic core of the time-plan optimizers.
TimePlan optimize_capped_c(const std::vector<double>& grid, const Matrix& regressors,
                           const Vector& c, double cap, const OptimizerConfig& cfg);

/// Constrained c-optimal time plan for extrapolation to t_star.
/// Uses only the time basis and sigma_eps, never Sigma_gamma.
TimePlan optimize_time_plan(const GridSpec& grid, const TimeBasis& basis, double sigma_eps,
                            double t_star, const OptimizerConfig& cfg = {});

/// Checks the constrained equivalence conditions for a plan on the grid.
OptimalityCertificate kkt_check(const ApproximateDesign& design, const GridSpec& grid,
                                const TimeBasis& basis, double sigma_eps, double t_star,
                                double tol);

/// Exact plan with k points of weight 1/k: keeps the saturated points and
/// picks the remaining ones among partially weighted points by maximal
/// efficiency (enumerated when small, greedy by sensitivity otherwise).
ApproximateDesign round_to_exact(const ApproximateDesign& design, int k, const TimeBasis& basis,
                                 double sigma_eps, double t_star, double saturation_tol = 1e-6);

/// Uncapped c-optimal straight-line design for extrapolation to t_star >= 1:
/// weight t*/(2t*-1) at t = 1 and (t*-1)/(2t*-1) at t = 0.
ApproximateDesign two_point_extrapolation_design(const DegradationModel& model, double t_star);

}  // namespace adt
