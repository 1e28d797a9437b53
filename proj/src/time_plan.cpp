#include "adtdesign/time_plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "adtdesign/criteria.hpp"
#include "adtdesign/error.hpp"

namespace adt {

namespace {

constexpr double kStallRelChange = 1e-14;
constexpr int kStallIters = 100;
constexpr std::size_t kMaxEnumerated = 20000;

struct Sensitivity {
  Vector phi;
  double criterion = 0.0;
};

Sensitivity sensitivity(const Matrix& g, const Vector& w, const Vector& c) {
  const Matrix info = g.transpose() * w.asDiagonal() * g;
  const Vector u = spd_inverse(info, "time-plan information") * c;
  Sensitivity s;
  s.criterion = c.dot(u);
  s.phi = (g * u).array().square() / s.criterion;
  return s;
}

// Bregman (Kullback-Leibler) projection onto {0 <= w <= cap, sum w = 1}:
// w = min(cap, s * v) with the scale s chosen to restore unit mass.
Vector capped_rescale(const Vector& v, double cap) {
  const auto n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  std::vector<double> tail(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    tail[i] = tail[i + 1] + v[order[i]];
  }
  Vector out(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double rest = 1.0 - static_cast<double>(m) * cap;
    if (tail[m] <= 0.0) break;
    const double s = rest / tail[m];
    if (s * v[order[m]] <= cap) {
      for (Eigen::Index i = 0; i < n; ++i) {
        out[order[i]] = i < m ? cap : std::min(cap, s * v[order[i]]);
      }
      return out;
    }
  }
  throw InfeasibleError("weight cap leaves no feasible design");
}

OptimalityCertificate certify(const Vector& w, const Vector& phi, double cap, double tol) {
  OptimalityCertificate cert;
  cert.sensitivity.assign(phi.data(), phi.data() + phi.size());
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double imin = std::numeric_limits<double>::infinity();
  double imax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    if (w[j] >= cap - tol) {
      cert.saturated_set.push_back(idx);
      upper = std::min(upper, phi[j]);
    } else if (w[j] <= tol) {
      cert.zero_set.push_back(idx);
      lower = std::max(lower, phi[j]);
    } else {
      cert.interior_set.push_back(idx);
      imin = std::min(imin, phi[j]);
      imax = std::max(imax, phi[j]);
    }
  }
  double v = std::max(0.0, lower - upper);
  if (!cert.interior_set.empty()) {
    v = std::max({v, imax - imin, imax - upper, lower - imin});
    cert.threshold = 0.5 * (imin + imax);
  } else if (std::isfinite(lower) && std::isfinite(upper)) {
    cert.threshold = 0.5 * (lower + upper);
  } else {
    cert.threshold = std::isfinite(upper) ? upper : lower;
  }
  cert.max_violation = v;
  cert.certified = v <= tol;
  return cert;
}

// Snap near-bound weights onto their bounds; the interior points absorb the mass change.
Vector polish(const Vector& w, double cap, double tol) {
  Vector out = w;
  std::vector<Eigen::Index> interior;
  double fixed = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] >= cap - tol) {
      out[j] = cap;
      fixed += cap;
    } else if (w[j] <= tol) {
      out[j] = 0.0;
    } else {
      interior.push_back(j);
    }
  }
  if (interior.empty()) return out / out.sum();
  double mass = 0.0;
  for (auto j : interior) mass += w[j];
  const double scale = (1.0 - fixed) / mass;
  if (!(scale > 0.0)) return w;
  for (auto j : interior) out[j] = w[j] * scale;
  return out;
}

// Newton steps on the interior weights with saturated and zero weights held fixed.
// The multiplicative update is slow along nearly flat directions between two
// interior points; the criterion is convex, so a few exact steps finish the job.
Vector refine_interior(const Matrix& g, const Vector& w0, const Vector& c, double cap,
                       double tol) {
  Vector w = w0;
  std::vector<Eigen::Index> in;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] > 0.0 && w[j] < cap) in.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(in.size());
  if (m < 2) return w;
  auto value = [&](const Vector& v) {
    const Matrix info = g.transpose() * v.asDiagonal() * g;
    return c.dot(spd_inverse(info, "time-plan information") * c);
  };
  double f = value(w);
  for (int iter = 0; iter < 50; ++iter) {
    const Matrix inv = spd_inverse(g.transpose() * w.asDiagonal() * g, "time-plan information");
    const Vector u = inv * c;
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    Vector rhs = Vector::Zero(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
      const Vector ga = g.row(in[a]).transpose();
      const double da = u.dot(ga);
      rhs[a] = da * da;
      for (Eigen::Index b = 0; b < m; ++b) {
        const Vector gb = g.row(in[b]).transpose();
        kkt(a, b) = 2.0 * da * u.dot(gb) * ga.dot(inv * gb);
      }
      kkt(a, m) = 1.0;
      kkt(m, a) = 1.0;
    }
    const Vector step = kkt.completeOrthogonalDecomposition().solve(rhs).head(m);
    double t = 1.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      const double x = w[in[a]];
      if (step[a] < 0.0) t = std::min(t, -x / step[a]);
      if (step[a] > 0.0) t = std::min(t, (cap - x) / step[a]);
    }
    bool moved = false;
    for (; t > 1e-12; t *= 0.5) {
      Vector trial = w;
      for (Eigen::Index a = 0; a < m; ++a) {
        trial[in[a]] = std::clamp(w[in[a]] + t * step[a], 0.0, cap);
      }
      double ft;
      try {
        ft = value(trial);
      } catch (const SingularDesignError&) {
        continue;
      }
      if (ft <= f) {
        moved = ft < f || (trial - w).norm() > 0.0;
        w = trial;
        f = ft;
        break;
      }
    }
    if (!moved || step.cwiseAbs().maxCoeff() * t <= 1e-3 * tol) break;
  }
  return w;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Matrix scaled_regressors(const std::vector<double>& grid, const TimeBasis& basis,
                         double sigma_eps) {
  return time_design_matrix(grid, basis) / sigma_eps;
}

// Forces sum == 1 to the last bit so the design constructor accepts it.
std::vector<double> exact_mass(std::vector<double> w) {
  auto big = std::max_element(w.begin(), w.end());
  double others = 0.0;
  for (auto it = w.begin(); it != w.end(); ++it) {
    if (it != big) others += *it;
  }
  *big = 1.0 - others;
  return w;
}

}  // namespace

void GridSpec::validate(int p2) const {
  if (J < 1) throw InfeasibleError("grid.J must be >= 1");
  if (k < 1) throw InfeasibleError("grid.k must be >= 1");
  if (J + 1 < k) {
    throw InfeasibleError("grid has " + std::to_string(J + 1) + " points, fewer than k = " +
                          std::to_string(k));
  }
  if (J + 1 < p2) {
    throw InfeasibleError("grid has " + std::to_string(J + 1) + " points, fewer than p2 = " +
                          std::to_string(p2));
  }
}

std::vector<double> GridSpec::points() const {
  std::vector<double> g(static_cast<std::size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) g[static_cast<std::size_t>(j)] = static_cast<double>(j) / J;
  return g;
}

void OptimizerConfig::validate() const {
  if (max_iters < 1) throw ConfigurationError("max_iters must be >= 1");
  if (!(tol > 0.0)) throw ConfigurationError("tol must be > 0");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigurationError("damping must be in (0,1]");
}

std::string OptimalityCertificate::pattern() const {
  std::string s(sensitivity.size(), '?');
  for (auto j : saturated_set) s[j] = 'S';
  for (auto j : interior_set) s[j] = 'I';
  for (auto j : zero_set) s[j] = 'Z';
  return s;
}

TimePlan optimize_capped_c(const std::vector<double>& grid, const Matrix& regressors,
                           const Vector& c, double cap, const OptimizerConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (regressors.rows() != n || regressors.cols() != c.size()) {
    throw ConfigurationError("regressor matrix does not match grid and c");
  }
  if (static_cast<double>(n) * cap < 1.0 - 1e-12) {
    throw InfeasibleError("weight cap leaves no feasible design");
  }

  // The multiplicative update needs a strictly positive start.
  Vector w = capped_rescale(Vector::Constant(n, 1.0), cap);
  TimePlan plan{ApproximateDesign::uniform(grid), {}, 0.0, 0, {}};

  Sensitivity s = sensitivity(regressors, w, c);
  plan.history.push_back(s.criterion);
  int stalled = 0;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (certify(w, s.phi, cap, 0.01 * cfg.tol).certified) break;
    const Vector next = capped_rescale(
        w.cwiseProduct(s.phi.array().pow(cfg.damping).matrix()), cap);
    const Sensitivity sn = sensitivity(regressors, next, c);
    const double rel = std::abs(s.criterion - sn.criterion) / s.criterion;
    w = next;
    s = sn;
    plan.history.push_back(s.criterion);
    stalled = rel <= kStallRelChange ? stalled + 1 : 0;
    if (stalled >= kStallIters) {
      ++it;
      break;
    }
  }
  plan.iterations = it;

  Vector polished = polish(w, cap, cfg.tol);
  try {
    polished = refine_interior(regressors, polished, c, cap, cfg.tol);
    const Sensitivity sp = sensitivity(regressors, polished, c);
    OptimalityCertificate cp = certify(polished, sp.phi, cap, cfg.tol);
    if (cp.max_violation <= certify(w, s.phi, cap, cfg.tol).max_violation || cp.certified) {
      w = polished;
      s = sp;
    }
  } catch (const SingularDesignError&) {
    // keep the unpolished iterate
  }

  plan.certificate = certify(w, s.phi, cap, cfg.tol);
  plan.criterion_fixed = s.criterion;
  plan.design = ApproximateDesign(grid, exact_mass(to_std(w)));
  return plan;
}

TimePlan optimize_time_plan(const GridSpec& grid, const TimeBasis& basis, double sigma_eps,
                            double t_star, const OptimizerConfig& cfg) {
  grid.validate(basis.dim());
  if (!(sigma_eps > 0.0)) throw ConfigurationError("sigma_eps must be > 0");
  if (!(t_star > 0.0)) throw ConfigurationError("t_star must be > 0");
  const std::vector<double> pts = grid.points();
  return optimize_capped_c(pts, scaled_regressors(pts, basis, sigma_eps), basis(t_star),
                           grid.cap(), cfg);
}

OptimalityCertificate kkt_check(const ApproximateDesign& design, const GridSpec& grid,
                                const TimeBasis& basis, double sigma_eps, double t_star,
                                double tol) {
  const std::vector<double> pts = grid.points();
  Vector w = Vector::Zero(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < design.size(); ++i) {
    const double t = design.points()[i];
    const double pos = t * grid.J;
    const auto j = static_cast<Eigen::Index>(std::lround(pos));
    if (std::abs(pos - static_cast<double>(j)) > 1e-9) {
      throw ConfigurationError("design point " + std::to_string(t) + " is not on the grid");
    }
    w[j] = design.weights()[i];
  }
  const Sensitivity s = sensitivity(scaled_regressors(pts, basis, sigma_eps), w, basis(t_star));
  return certify(w, s.phi, grid.cap(), tol);
}

ApproximateDesign round_to_exact(const ApproximateDesign& design, int k, const TimeBasis& basis,
                                 double sigma_eps, double t_star, double saturation_tol) {
  if (k < 1) throw ConfigurationError("k must be >= 1");
  if (design.size() < static_cast<std::size_t>(k)) {
    throw InfeasibleError("design has " + std::to_string(design.size()) +
                          " candidate points, fewer than k = " + std::to_string(k));
  }
  const double cap = 1.0 / k;
  const std::vector<double> pts(design.points().begin(), design.points().end());
  const Vector w = Eigen::Map<const Vector>(design.weights().data(),
                                            static_cast<Eigen::Index>(design.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (w[j] > cap + saturation_tol) {
      throw ConfigurationError("design weight exceeds the cap 1/k");
    }
  }

  std::vector<std::size_t> saturated;
  std::vector<std::size_t> partial;
  std::vector<std::size_t> empty;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (w[static_cast<Eigen::Index>(j)] >= cap - saturation_tol) {
      saturated.push_back(j);
    } else if (w[static_cast<Eigen::Index>(j)] > 0.0) {
      partial.push_back(j);
    } else {
      empty.push_back(j);
    }
  }
  if (saturated.size() > static_cast<std::size_t>(k)) {
    throw ConfigurationError("more than k saturated points");
  }
  const std::size_t need = static_cast<std::size_t>(k) - saturated.size();

  const Matrix g = scaled_regressors(pts, basis, sigma_eps);
  const Vector c = basis(t_star);
  auto criterion = [&](const std::vector<std::size_t>& chosen) {
    Vector u = Vector::Zero(g.rows());
    for (auto j : chosen) u[static_cast<Eigen::Index>(j)] = cap;
    try {
      return sensitivity(g, u, c).criterion;
    } catch (const SingularDesignError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Candidate pool: partial points first, topped up with empty points by
  // decreasing sensitivity of the input design when too few are partial.
  std::vector<std::size_t> pool = partial;
  if (pool.size() < need) {
    Vector phi = Vector::Zero(g.rows());
    try {
      phi = sensitivity(g, w, c).phi;
    } catch (const SingularDesignError&) {
    }
    std::stable_sort(empty.begin(), empty.end(),
                     [&](auto a, auto b) { return phi[static_cast<Eigen::Index>(a)] >
                                                  phi[static_cast<Eigen::Index>(b)]; });
    for (auto j : empty) {
      if (pool.size() == need) break;
      pool.push_back(j);
    }
  }

  auto combinations = [](std::size_t n, std::size_t r) {
    double total = 1.0;
    for (std::size_t i = 0; i < r; ++i) total = total * static_cast<double>(n - i) / (i + 1);
    return total;
  };

  std::vector<std::size_t> best;
  double best_value = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<std::size_t> chosen) {
    std::sort(chosen.begin(), chosen.end());
    const double value = criterion(chosen);
    const double scale = std::max(std::abs(value), std::abs(best_value));
    const bool tie = std::isfinite(value) && std::isfinite(best_value) &&
                     std::abs(value - best_value) <= 1e-12 * scale;
    // Every completion keeps the saturated set, so ties fall through to the
    // lexicographic order of the support.
    if ((!tie && value < best_value) || (tie && chosen < best)) {
      best = std::move(chosen);
      best_value = value;
    }
  };

  if (combinations(pool.size(), need) <= static_cast<double>(kMaxEnumerated)) {
    std::vector<bool> mask(pool.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(need), true);
    do {
      std::vector<std::size_t> chosen = saturated;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (mask[i]) chosen.push_back(pool[i]);
      }
      consider(std::move(chosen));
    } while (std::prev_permutation(mask.begin(), mask.end()));
  } else {
    Vector phi = sensitivity(g, w, c).phi;
    std::stable_sort(pool.begin(), pool.end(), [&](auto a, auto b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      return w[ia] != w[ib] ? w[ia] > w[ib] : phi[ia] > phi[ib];
    });
    std::vector<std::size_t> chosen = saturated;
    chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(need));
    consider(std::move(chosen));
  }
  if (!std::isfinite(best_value)) {
    throw SingularDesignError("no exact completion with a non-singular information matrix");
  }

  std::vector<double> out;
  for (auto j : best) out.push_back(pts[j]);
  return ApproximateDesign::uniform(std::move(out));
}

ApproximateDesign two_point_extrapolation_design(const DegradationModel& model, double t_star) {
  if (!model.time_basis().is_affine()) {
    throw OutOfRegimeError("two-point extrapolation design needs an affine time basis");
  }
  if (!model.homoscedastic()) {
    throw OutOfRegimeError("two-point extrapolation design needs homoscedastic errors");
  }
  if (!(t_star >= 1.0)) {
    throw OutOfRegimeError("t_star < 1 is interpolation; use the grid optimizer");
  }
  const double upper = t_star / (2.0 * t_star - 1.0);
  return ApproximateDesign({0.0, 1.0}, {1.0 - upper, upper});
}

}  // namespace adt
