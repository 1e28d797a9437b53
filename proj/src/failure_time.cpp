#include "adtdesign/failure_time.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "adtdesign/error.hpp"

namespace adt {

namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kBracketLimit = 1e6;
constexpr int kMonotoneSamples = 1000;

// h with the sigma_u == 0 limits made explicit.
double h_extended(double t, const DegradationModel& model) {
  const double margin = mu_aggregate(t, model) - model.y0();
  const double var = sigma_u2(t, model);
  if (var > 0.0) return margin / std::sqrt(var);
  if (margin == 0.0) return 0.0;
  return margin > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigurationError("probability must lie in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double mu_aggregate(double t, const DegradationModel& model) {
  return model.time_basis()(t).dot(eval_delta(model));
}

double sigma_u2(double t, const DegradationModel& model) {
  const Vector f = model.time_basis()(t);
  return std::max(0.0, f.dot(model.sigma_gamma() * f));
}

double h(double t, const DegradationModel& model) {
  const double margin = mu_aggregate(t, model) - model.y0();
  const double var = sigma_u2(t, model);
  if (var <= 0.0) {
    if (margin == 0.0) {
      throw DegenerateVarianceError("h(t) indeterminate: sigma_u(t) = 0 and mu(t) = y0");
    }
    throw DegenerateVarianceError("h(t) undefined: sigma_u(t) = 0");
  }
  return margin / std::sqrt(var);
}

double failure_cdf(double t, const DegradationModel& model) { return normal_cdf(h(t, model)); }

double median_failure_time(const DegradationModel& model) {
  if (!model.time_basis().is_affine()) {
    throw ConfigurationError("closed-form median needs an affine time basis; use quantile(0.5)");
  }
  const Vector delta = eval_delta(model);
  if (!(delta[1] > 0.0) || !(delta[0] < model.y0())) {
    throw NoPositiveMedianError("no positive median: need delta_2 > 0 and delta_1 < y0 (delta = (" +
                                std::to_string(delta[0]) + ", " + std::to_string(delta[1]) +
                                "), y0 = " + std::to_string(model.y0()) + ")");
  }
  return (model.y0() - delta[0]) / delta[1];
}

QuantileResult quantile(double alpha, const DegradationModel& model) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigurationError("alpha must lie in (0,1)");
  const double z = normal_quantile(alpha);

  QuantileResult out;
  out.lower = 0.0;
  out.upper = 1.0;
  if (h_extended(0.0, model) >= z) return out;  // below the window: F(0) >= alpha

  while (h_extended(out.upper, model) <= z) {
    if (out.upper > kBracketLimit) return out;  // above the window
    out.upper *= 2.0;
  }

  // Uniqueness of the root follows from monotonicity of h, which holds
  // analytically for straight lines with rho >= 0 only.
  const bool proven = model.time_basis().is_affine() && model.sigma_gamma()(0, 1) >= 0.0;
  if (!proven) {
    double prev = h_extended(0.0, model);
    for (int i = 1; i <= kMonotoneSamples; ++i) {
      const double t = out.upper * i / kMonotoneSamples;
      const double cur = h_extended(t, model);
      if (!(cur > prev)) {
        throw OutOfRegimeError("h(t) is not increasing on [0, " + std::to_string(out.upper) +
                               "]; quantile would not be unique");
      }
      prev = cur;
    }
  }

  // Bisect to the floating-point limit; the residual bound is checked after.
  double lo = out.lower;
  double hi = out.upper;
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h_extended(mid, model) < z) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mid = std::abs(h_extended(lo, model) - z) < std::abs(h_extended(hi, model) - z)
                         ? lo
                         : hi;
  if (!(std::abs(h_extended(mid, model) - z) <= kResidualTol)) {
    throw Error("quantile root finder did not reach the residual tolerance");
  }
  out.t_alpha = mid;
  out.exists = true;
  return out;
}

}  // namespace adt
