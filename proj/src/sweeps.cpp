#include "adtdesign/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adtdesign/destructive.hpp"
#include "adtdesign/error.hpp"
#include "adtdesign/failure_time.hpp"

namespace adt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const SweepSpec& spec, Candidate c) {
  return std::find(spec.candidates.begin(), spec.candidates.end(), c) != spec.candidates.end();
}

// Straight-line criterion of a design on {0, 1} with weights (1 - w1, w1)
// and endpoint sds s0, s1: c = alpha g(0) + beta g(1) gives
// alpha^2 / w0 + beta^2 / w1 with alpha = (1 - t) s0, beta = t s1.
double endpoint_criterion(double w1, double t_star, double s0, double s1) {
  const double alpha = (1.0 - t_star) * s0;
  const double beta = t_star * s1;
  return alpha * alpha / (1.0 - w1) + beta * beta / w1;
}

std::vector<DesignPoint> with_stress(const ApproximateDesign& xi, const ApproximateDesign& tau) {
  return product_design(xi, tau).combined;
}

}  // namespace

SweepSpec SweepSpec::defaults(SweepVariable variable) {
  SweepSpec s;
  s.variable = variable;
  if (variable == SweepVariable::SigmaRatio) {
    s.lo = 0.2;
    s.hi = 5.0;
  }
  return s;
}

void SweepSpec::validate() const {
  if (!(lo < hi)) throw ConfigurationError("sweep.lo must be < sweep.hi");
  if (n_points < 2) throw ConfigurationError("sweep.n must be >= 2");
  if (variable == SweepVariable::TMedian && !(lo > 1.0)) {
    throw ConfigurationError("sweep.lo must be > 1 for t_median sweeps");
  }
  if (variable == SweepVariable::SigmaRatio && !(lo > 0.0)) {
    throw ConfigurationError("sweep.lo must be > 0 for sigma_ratio sweeps");
  }
}

std::vector<double> SweepSpec::abscissae() const {
  std::vector<double> xs(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    const double u = static_cast<double>(i) / (n_points - 1);
    xs[static_cast<std::size_t>(i)] =
        log_spaced ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)))
                   : lo + u * (hi - lo);
  }
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

ApproximateDesign uniform_time_design(int k) {
  if (k < 2) throw ConfigurationError("uniform time design needs k >= 2");
  std::vector<double> pts(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) pts[static_cast<std::size_t>(j)] = static_cast<double>(j) / (k - 1);
  return ApproximateDesign::uniform(std::move(pts));
}

std::pair<double, double> reachable_ratio_interval(const DegradationModel& model) {
  const RandomLineCovariance cov = model.line_covariance();
  const double se2 = model.sigma_eps() * model.sigma_eps();
  const double s1 = std::sqrt(cov.sigma2 * cov.sigma2 + se2);
  const double base = s1 * s1 + se2;
  auto ratio = [&](double rho) {
    return std::sqrt((base + 2.0 * rho * s1 * cov.sigma2 + cov.sigma2 * cov.sigma2) / base);
  };
  return {ratio(-1.0), ratio(1.0)};
}

DegradationModel vary_ratio_via_rho(double target_ratio, const DegradationModel& model) {
  if (!(target_ratio > 0.0)) throw ConfigurationError("target ratio must be > 0");
  const RandomLineCovariance cov = model.line_covariance();
  if (!(cov.sigma2 > 0.0)) throw ConfigurationError("varying rho needs sigma2 > 0");
  const double se2 = model.sigma_eps() * model.sigma_eps();
  const double s2 = cov.sigma2;
  const double s1 = std::sqrt(s2 * s2 + se2);
  const double rho =
      (target_ratio * target_ratio * (s1 * s1 + se2) - s1 * s1 - s2 * s2 - se2) / (2.0 * s1 * s2);
  if (!(std::abs(rho) <= 1.0)) {
    const auto [lo, hi] = reachable_ratio_interval(model);
    throw ConfigurationError("sigma ratio " + std::to_string(target_ratio) +
                             " unreachable with |rho| <= 1; reachable interval [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return model.with_sigma_gamma(RandomLineCovariance{s1, s2, rho}.matrix());
}

SweepResult sweep_pi_star(const SweepSpec& spec, const DegradationModel& model) {
  spec.validate();
  SweepResult out;
  out.variable = spec.variable;
  out.nominal_t_median = median_failure_time(model);
  out.nominal_ratio = VarianceFunction(model).endpoint_ratio();
  for (double x : spec.abscissae()) {
    SweepRow row;
    row.abscissa = x;
    row.eff_zeta_star = row.eff_tau2 = row.eff_tau6 = kNaN;
    const double t = spec.variable == SweepVariable::TMedian ? x : out.nominal_t_median;
    const double r = spec.variable == SweepVariable::SigmaRatio ? x : out.nominal_ratio;
    if (!(t > 1.0)) {
      row.skipped = true;
      row.pi_star = kNaN;
    } else {
      row.pi_star = elfving_time_weight(t, r);
    }
    out.rows.push_back(row);
  }
  return out;
}

SweepResult sweep_efficiency(const SweepSpec& spec, const DegradationModel& model) {
  SweepResult out = sweep_pi_star(spec, model);
  const ApproximateDesign xi = elfving_stress_design(model);
  const double nominal_pi = elfving_time_weight(out.nominal_t_median, out.nominal_ratio);
  const ApproximateDesign tau_nominal({0.0, 1.0}, {1.0 - nominal_pi, nominal_pi});
  const ApproximateDesign tau2 = uniform_time_design(2);
  const ApproximateDesign tau6 = uniform_time_design(6);
  const auto [ratio_lo, ratio_hi] = spec.variable == SweepVariable::SigmaRatio
                                        ? reachable_ratio_interval(model)
                                        : std::pair<double, double>{0.0, 0.0};

  for (SweepRow& row : out.rows) {
    if (row.skipped) continue;
    const double t = spec.variable == SweepVariable::TMedian ? row.abscissa
                                                             : out.nominal_t_median;
    const ApproximateDesign tau_opt({0.0, 1.0}, {1.0 - row.pi_star, row.pi_star});

    if (spec.variable == SweepVariable::SigmaRatio &&
        !(row.abscissa >= ratio_lo && row.abscissa <= ratio_hi)) {
      // No admissible rho: only sigma(1)/sigma(0) is known, which determines
      // the criterion of endpoint-supported designs and nothing else.
      row.ratio_reachable = false;
      const double best = endpoint_criterion(row.pi_star, t, 1.0, row.abscissa);
      row.eff_zeta_star = wants(spec, Candidate::ZetaStarNominal)
                              ? best / endpoint_criterion(nominal_pi, t, 1.0, row.abscissa)
                              : kNaN;
      row.eff_tau2 = wants(spec, Candidate::UniformTau2)
                         ? best / endpoint_criterion(0.5, t, 1.0, row.abscissa)
                         : kNaN;
      row.eff_tau6 = kNaN;
      continue;
    }

    const DegradationModel truth = spec.variable == SweepVariable::SigmaRatio
                                       ? vary_ratio_via_rho(row.abscissa, model)
                                       : model;
    const double best = avar_single_obs(with_stress(xi, tau_opt), truth, t);
    auto eff = [&](Candidate c, const ApproximateDesign& tau) {
      return wants(spec, c) ? best / avar_single_obs(with_stress(xi, tau), truth, t) : kNaN;
    };
    row.eff_zeta_star = eff(Candidate::ZetaStarNominal, tau_nominal);
    row.eff_tau2 = eff(Candidate::UniformTau2, tau2);
    row.eff_tau6 = eff(Candidate::UniformTau6, tau6);
  }
  return out;
}

std::string to_string(SweepVariable v) {
  return v == SweepVariable::TMedian ? "t_median" : "sigma_ratio";
}

std::string to_string(Candidate c) {
  switch (c) {
    case Candidate::ZetaStarNominal:
      return "zeta_star_nominal";
    case Candidate::UniformTau2:
      return "xi_star_tau2";
    case Candidate::UniformTau6:
      return "xi_star_tau6";
  }
  return "?";
}

}  // namespace adt
