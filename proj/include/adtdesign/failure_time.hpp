#pragma once

#include "adtdesign/model.hpp"

namespace adt {

/// Standard normal CDF and quantile.
double normal_cdf(double z);
double normal_quantile(double p);

/// Mean degradation path at use conditions, mu(t) = f2(t)^T delta.
double mu_aggregate(double t, const DegradationModel& model);

/// Variance of the unit-specific path at use conditions, f2(t)^T Sigma_gamma f2(t).
double sigma_u2(double t, const DegradationModel& model);

/// Standardized margin h(t) = (mu(t) - y0) / sigma_u(t).
/// Throws DegenerateVarianceError when sigma_u(t) == 0.
double h(double t, const DegradationModel& model);

/// P(T <= t) = Phi(h(t)) for the soft-failure time T under use conditions.
double failure_cdf(double t, const DegradationModel& model);

/// Closed form (y0 - delta_1) / delta_2 for straight-line paths.
/// Throws NoPositiveMedianError unless delta_2 > 0 and delta_1 < y0.
double median_failure_time(const DegradationModel& model);

struct QuantileResult {
  double t_alpha = 0.0;
  bool exists = false;
  double lower = 0.0;
  double upper = 0.0;
};

/// Solves h(t) = z_alpha on t > 0 by bisection on a doubling bracket.
/// Non-existence (alpha outside the attainable window) sets exists = false.
/// Throws OutOfRegimeError if h is not increasing on the bracket, since the
/// root would then not be unique.
QuantileResult quantile(double alpha, const DegradationModel& model);

}  // namespace adt
