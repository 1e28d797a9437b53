#include "adtdesign/destructive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adtdesign/criteria.hpp"
#include "adtdesign/error.hpp"

namespace adt {

namespace {

constexpr int kVarianceSamples = 1001;

}  // namespace

VarianceFunction::VarianceFunction(const DegradationModel& model)
    : basis_(model.time_basis()),
      sigma_gamma_(model.sigma_gamma()),
      sigma_eps2_(model.sigma_eps() * model.sigma_eps()) {
  double lowest = std::min(variance(0.0), variance(1.0));
  if (basis_.is_affine()) {
    // sigma^2(t) = a + 2bt + ct^2 has its stationary point at -b/c.
    const double b = sigma_gamma_(0, 1);
    const double c = sigma_gamma_(1, 1);
    if (c > 0.0) {
      const double t = -b / c;
      if (t > 0.0 && t < 1.0) lowest = std::min(lowest, variance(t));
    }
  } else {
    for (int i = 1; i < kVarianceSamples - 1; ++i) {
      lowest = std::min(lowest, variance(static_cast<double>(i) / (kVarianceSamples - 1)));
    }
  }
  if (!(lowest > 0.0)) {
    throw DegenerateVarianceError("measurement variance sigma^2(t) is not positive on [0,1]");
  }
}

double VarianceFunction::variance(double t) const {
  const Vector f = basis_(t);
  return f.dot(sigma_gamma_ * f) + sigma_eps2_;
}

double VarianceFunction::sd(double t) const {
  const double v = variance(t);
  if (!(v > 0.0)) throw DegenerateVarianceError("sigma(t) = 0");
  return std::sqrt(v);
}

Vector weighted_f2(double t, const DegradationModel& model) {
  const Vector f = model.time_basis()(t);
  const double v = f.dot(model.sigma_gamma() * f) + model.sigma_eps() * model.sigma_eps();
  if (!(v > 0.0)) throw DegenerateVarianceError("sigma(t) = 0");
  return f / std::sqrt(v);
}

double elfving_time_weight(double t_star, double ratio) {
  if (!(t_star > 1.0)) {
    throw OutOfRegimeError("Elfving endpoint design needs t_star > 1; use the grid optimizer");
  }
  if (!(ratio > 0.0)) throw ConfigurationError("sd ratio must be > 0");
  return t_star * ratio / (t_star * ratio + (t_star - 1.0));
}

ApproximateDesign elfving_time_design(const DegradationModel& model, double t_star) {
  if (!model.time_basis().is_affine()) {
    throw OutOfRegimeError("Elfving endpoint design needs an affine time basis");
  }
  const VarianceFunction var(model);
  const double pi = elfving_time_weight(t_star, var.endpoint_ratio());
  return ApproximateDesign({0.0, 1.0}, {1.0 - pi, pi});
}

ApproximateDesign elfving_stress_design(const DegradationModel& model) {
  if (!model.stress_basis().is_affine()) {
    throw OutOfRegimeError("Elfving stress design needs an affine stress basis");
  }
  const double x = model.x_use();
  if (x >= 0.0 && x <= 1.0) {
    throw OutOfRegimeError("use stress x_u = " + std::to_string(x) +
                           " lies inside [0,1]; not an extrapolation");
  }
  if (x < 0.0) {
    const double at_one = -x / (-x + (1.0 - x));
    return ApproximateDesign({0.0, 1.0}, {1.0 - at_one, at_one});
  }
  const double at_zero = (x - 1.0) / ((x - 1.0) + x);
  return ApproximateDesign({0.0, 1.0}, {at_zero, 1.0 - at_zero});
}

ProductDesign product_design(const ApproximateDesign& xi, const ApproximateDesign& tau) {
  ProductDesign z{xi, tau, {}};
  for (std::size_t i = 0; i < xi.size(); ++i) {
    for (std::size_t j = 0; j < tau.size(); ++j) {
      z.combined.push_back({xi.points()[i], tau.points()[j], xi.weights()[i] * tau.weights()[j]});
    }
  }
  return z;
}

Matrix info_single_obs(const std::vector<DesignPoint>& zeta, const DegradationModel& model) {
  const int p = model.p1() * model.p2();
  Matrix m = Matrix::Zero(p, p);
  for (const auto& pt : zeta) {
    const Vector f = kron_vec(model.stress_basis()(pt.x), weighted_f2(pt.t, model));
    m.noalias() += pt.weight * f * f.transpose();
  }
  return m;
}

Matrix info_single_obs(const ProductDesign& zeta, const DegradationModel& model) {
  return info_single_obs(zeta.combined, model);
}

Matrix info_time_weighted(const ApproximateDesign& tau, const DegradationModel& model) {
  Matrix m = Matrix::Zero(model.p2(), model.p2());
  for (std::size_t j = 0; j < tau.size(); ++j) {
    const Vector f = weighted_f2(tau.points()[j], model);
    m.noalias() += tau.weights()[j] * f * f.transpose();
  }
  return m;
}

double avar_single_obs(const std::vector<DesignPoint>& zeta, const DegradationModel& model,
                       double t_star) {
  const Vector c = kron_vec(model.stress_basis()(model.x_use()), model.time_basis()(t_star));
  return c.dot(spd_inverse(info_single_obs(zeta, model), "single-observation information") * c);
}

double time_efficiency_single_obs(const ApproximateDesign& tau,
                                  const ApproximateDesign& reference,
                                  const DegradationModel& model, double t_star) {
  const Vector c = model.time_basis()(t_star);
  const double ref = c.dot(spd_inverse(info_time_weighted(reference, model)) * c);
  const double cand = c.dot(spd_inverse(info_time_weighted(tau, model)) * c);
  return ref / cand;
}

ApproximateDesign elfving_brute_force_oracle(const DegradationModel& model, double t_star,
                                             int grid_n) {
  if (model.p2() != 2) throw OutOfRegimeError("brute-force oracle needs an affine time basis");
  if (grid_n < 2) throw ConfigurationError("grid_n must be >= 2");
  std::vector<Vector> g;
  std::vector<double> ts;
  for (int i = 0; i < grid_n; ++i) {
    ts.push_back(static_cast<double>(i) / (grid_n - 1));
    g.push_back(weighted_f2(ts.back(), model));
  }
  const Vector c = model.time_basis()(t_star);

  // For a fixed support {a, b}, c = alpha g_a + beta g_b and the c-optimal
  // weights are |alpha| : |beta| with criterion (|alpha| + |beta|)^2.
  double best = std::numeric_limits<double>::infinity();
  std::size_t ba = 0;
  std::size_t bb = 0;
  double bwa = 0.0;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b = a + 1; b < g.size(); ++b) {
      const double det = g[a][0] * g[b][1] - g[a][1] * g[b][0];
      if (det == 0.0) continue;
      const double alpha = (c[0] * g[b][1] - c[1] * g[b][0]) / det;
      const double beta = (g[a][0] * c[1] - g[a][1] * c[0]) / det;
      const double l1 = std::abs(alpha) + std::abs(beta);
      if (l1 * l1 < best) {
        best = l1 * l1;
        ba = a;
        bb = b;
        bwa = std::abs(alpha) / l1;
      }
    }
  }
  if (bwa == 0.0) return ApproximateDesign({ts[bb]}, {1.0});
  if (bwa == 1.0) return ApproximateDesign({ts[ba]}, {1.0});
  return ApproximateDesign({ts[ba], ts[bb]}, {bwa, 1.0 - bwa});
}

TimePlan destructive_time_plan_numeric(const DegradationModel& model, double t_star, int J,
                                       const OptimizerConfig& cfg) {
  if (J < model.p2() - 1) throw InfeasibleError("grid too coarse for the time basis");
  const GridSpec grid{J, 1};
  const std::vector<double> pts = grid.points();
  Matrix g(static_cast<Eigen::Index>(pts.size()), model.p2());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    g.row(static_cast<Eigen::Index>(j)) = weighted_f2(pts[j], model).transpose();
  }
  return optimize_capped_c(pts, g, model.time_basis()(t_star), 1.0, cfg);
}

}  // namespace adt
