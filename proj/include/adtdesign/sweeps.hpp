#pragma once

#include <string>
#include <vector>

#include "adtdesign/model.hpp"

namespace adt {

enum class SweepVariable { TMedian, SigmaRatio };

enum class Candidate { ZetaStarNominal, UniformTau2, UniformTau6 };

struct SweepSpec {
  SweepVariable variable = SweepVariable::TMedian;
  double lo = 1.05;
  double hi = 10.0;
  int n_points = 200;
  bool log_spaced = true;
  std::vector<Candidate> candidates = {Candidate::ZetaStarNominal, Candidate::UniformTau2,
                                       Candidate::UniformTau6};

  /// Defaults covering the qualitative features of both sweeps:
  /// t_0.5 in [1.05, 10] and sigma(1)/sigma(0) in [0.2, 5], 200 log-spaced points.
  static SweepSpec defaults(SweepVariable variable);
  void validate() const;
  std::vector<double> abscissae() const;
};

struct SweepRow {
  double abscissa = 0.0;
  double pi_star = 0.0;
  double eff_zeta_star = 0.0;
  double eff_tau2 = 0.0;
  double eff_tau6 = 0.0;
  /// Abscissa outside the Elfving regime (t_0.5 <= 1); all values NaN.
  bool skipped = false;
  /// sigma(1)/sigma(0) attainable by varying rho with sigma1^2 = sigma2^2 + sigma_eps^2.
  /// When false only endpoint-supported designs can be scored and eff_tau6 is NaN.
  bool ratio_reachable = true;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::TMedian;
  std::vector<SweepRow> rows;
  double nominal_t_median = 0.0;
  double nominal_ratio = 0.0;
};

/// Uniform weight 1/k on t = j / (k - 1), j = 0..k-1.
ApproximateDesign uniform_time_design(int k);

/// Model with sigma1 = sqrt(sigma2^2 + sigma_eps^2), nominal sigma2 and sigma_eps,
/// and rho solved so that sigma(1)/sigma(0) equals target_ratio.
/// Throws ConfigurationError naming the reachable interval when |rho| would exceed 1.
DegradationModel vary_ratio_via_rho(double target_ratio, const DegradationModel& model);

/// Reachable sigma(1)/sigma(0) interval of vary_ratio_via_rho.
std::pair<double, double> reachable_ratio_interval(const DegradationModel& model);

/// Optimal Elfving weight at t = 1 along the sweep, the other parameter at nominal.
SweepResult sweep_pi_star(const SweepSpec& spec, const DegradationModel& model);

/// pi_star plus efficiencies of the candidate designs against the design that
/// is locally optimal at each abscissa, in the single-observation model.
SweepResult sweep_efficiency(const SweepSpec& spec, const DegradationModel& model);

std::string to_string(SweepVariable v);
std::string to_string(Candidate c);

}  // namespace adt
