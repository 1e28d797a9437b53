#pragma once

#include <optional>
#include <span>

#include "adtdesign/model.hpp"

namespace adt {

/// Inverse of a symmetric positive definite information matrix.
/// Throws SingularDesignError naming the least-informed direction.
Matrix spd_inverse(const Matrix& m, const char* what = "information matrix");

/// Per-observation fixed-effect information of a time plan,
/// sigma_eps^-2 * sum_j pi_j f2(t_j) f2(t_j)^T. Takes only the basis and the
/// error scale: the optimal time plan never depends on Sigma_gamma.
Matrix info_time_fixed(const ApproximateDesign& tau, const TimeBasis& basis, double sigma_eps);
Matrix info_time_fixed(const ApproximateDesign& tau, const DegradationModel& model);

/// Exact k-point plan, one measurement per time point and unit:
/// F2^T Sigma_eps^-1 F2 / k (per observation) ...
Matrix info_time_fixed_exact(std::span<const double> times, const DegradationModel& model);
/// ... and the per-unit (k-scaled) variant F2^T Sigma_eps^-1 F2.
Matrix info_time_fixed_per_unit(std::span<const double> times, const DegradationModel& model);

/// M2^-1 = M2_0^-1 + Sigma_gamma, with M2_0 normalized per observation.
Matrix inv_info_time_mixed(const ApproximateDesign& tau, const DegradationModel& model);

/// Per-unit inverse information (F2^T Sigma_eps^-1 F2)^-1 + Sigma_gamma of an exact plan.
Matrix inv_info_time_mixed_per_unit(std::span<const double> times,
                                    const DegradationModel& model);

/// Asymptotic variance of the estimated median, split into its design-dependent
/// (fixed-effect) and design-free (random-effect) parts. All values are
/// reported up to the constant factor c0^2.
struct CriterionReport {
  double criterion_total = 0.0;
  double criterion_fixed = 0.0;
  double criterion_random = 0.0;
  std::optional<double> stress_factor;
  double t_star = 0.0;
};

CriterionReport c_criterion_time(const ApproximateDesign& tau, const DegradationModel& model,
                                 double t_star);

/// Criterion for an exact plan under a full error covariance (per observation).
CriterionReport c_criterion_time_exact(std::span<const double> times,
                                       const DegradationModel& model, double t_star);

/// M1(xi) = sum_i w_i f1(x_i) f1(x_i)^T.
Matrix info_stress(const ApproximateDesign& xi, const StressBasis& basis);

/// f1(x_u)^T M1(xi)^-1 f1(x_u).
double stress_factor(const ApproximateDesign& xi, const DegradationModel& model);

/// aVar of the median estimator for the product plan xi (x) tau, with c0 = 1.
CriterionReport avar_median(const ApproximateDesign& xi, const ApproximateDesign& tau,
                            const DegradationModel& model);

/// criterion_total(reference) / criterion_total(candidate).
double efficiency(const ApproximateDesign& candidate, const ApproximateDesign& reference,
                  const DegradationModel& model, double t_star);

/// Extrapolation time targeted by design optimization for the alpha-quantile.
/// Only the median is supported: for alpha != 0.5 the criterion involves the
/// variance-parameter information, which is not modelled here.
double design_target_time(double alpha, const DegradationModel& model);

}  // namespace adt
