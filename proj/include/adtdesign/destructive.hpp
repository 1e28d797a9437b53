#pragma once

#include <vector>

#include "adtdesign/model.hpp"
#include "adtdesign/time_plan.hpp"

namespace adt {

/// Total variance of a single measurement at time t,
/// sigma^2(t) = f2(t)^T Sigma_gamma f2(t) + sigma_eps^2.
class VarianceFunction {
 public:
  /// Throws DegenerateVarianceError unless sigma^2 > 0 on all of [0, 1].
  explicit VarianceFunction(const DegradationModel& model);

  double variance(double t) const;
  double sd(double t) const;
  /// sigma(1) / sigma(0).
  double endpoint_ratio() const { return sd(1.0) / sd(0.0); }

 private:
  TimeBasis basis_;
  Matrix sigma_gamma_;
  double sigma_eps2_;
};

/// f2(t) / sigma(t).
Vector weighted_f2(double t, const DegradationModel& model);

/// Elfving weight at t = 1 for a straight line with endpoint sd ratio r:
/// t* r / (t* r + t* - 1). Requires t_star > 1, r > 0.
double elfving_time_weight(double t_star, double ratio);

/// c-optimal single-observation time design for extrapolation to t_star > 1.
ApproximateDesign elfving_time_design(const DegradationModel& model, double t_star);

/// c-optimal stress design on {0, 1} for extrapolation to x_u outside [0, 1].
ApproximateDesign elfving_stress_design(const DegradationModel& model);

struct DesignPoint {
  double x = 0.0;
  double t = 0.0;
  double weight = 0.0;
};

struct ProductDesign {
  ApproximateDesign stress_design;
  ApproximateDesign time_design;
  std::vector<DesignPoint> combined;  // stress-major order
};

ProductDesign product_design(const ApproximateDesign& xi, const ApproximateDesign& tau);

/// M(zeta) = sum_i eta_i (f1 f1^T) (x) (f~2 f~2^T) for one measurement per unit.
Matrix info_single_obs(const std::vector<DesignPoint>& zeta, const DegradationModel& model);
Matrix info_single_obs(const ProductDesign& zeta, const DegradationModel& model);

/// M~2(tau) = sum_j pi_j f~2(t_j) f~2(t_j)^T.
Matrix info_time_weighted(const ApproximateDesign& tau, const DegradationModel& model);

/// c^T M(zeta)^-1 c with c = f1(x_u) (x) f2(t_star).
double avar_single_obs(const std::vector<DesignPoint>& zeta, const DegradationModel& model,
                       double t_star);

/// Marginal c-efficiency of tau against reference in the single-observation model.
double time_efficiency_single_obs(const ApproximateDesign& tau,
                                  const ApproximateDesign& reference,
                                  const DegradationModel& model, double t_star);

/// Exhaustive search over two-point supports on a grid_n-point grid of [0, 1],
/// each with its closed-form c-optimal weights. Validation oracle for the
/// Elfving constructions.
ApproximateDesign elfving_brute_force_oracle(const DegradationModel& model, double t_star,
                                             int grid_n);

/// Single-observation time plan for any time basis: the grid optimizer run on
/// f2 / sigma with no weight cap.
TimePlan destructive_time_plan_numeric(const DegradationModel& model, double t_star, int J,
                                       const OptimizerConfig& cfg = {});

}  // namespace adt
