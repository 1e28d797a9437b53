#include "adtdesign/criteria.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "adtdesign/error.hpp"
#include "adtdesign/failure_time.hpp"

namespace adt {

namespace {

Matrix weighted_moments(std::span<const double> points, std::span<const double> weights,
                        const TimeBasis& basis) {
  Matrix m = Matrix::Zero(basis.dim(), basis.dim());
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (weights[j] == 0.0) continue;
    const Vector f = basis(points[j]);
    m.noalias() += weights[j] * f * f.transpose();
  }
  return m;
}

const Matrix& full_error(const DegradationModel& model, Eigen::Index k) {
  const Matrix& s = std::get<FullErrorCovariance>(model.error()).sigma_eps;
  if (s.rows() != k) {
    throw ConfigurationError("sigma_eps is " + std::to_string(s.rows()) + "x" +
                             std::to_string(s.rows()) + " but the plan has " +
                             std::to_string(k) + " time points");
  }
  return s;
}

CriterionReport make_report(const Matrix& m0_inv, const DegradationModel& model,
                            double t_star) {
  if (!(t_star > 0.0)) throw ConfigurationError("t_star must be > 0");
  const Vector c = model.time_basis()(t_star);
  CriterionReport r;
  r.t_star = t_star;
  r.criterion_fixed = c.dot(m0_inv * c);
  r.criterion_random = c.dot(model.sigma_gamma() * c);
  r.criterion_total = r.criterion_fixed + r.criterion_random;
  return r;
}

}  // namespace

Matrix spd_inverse(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  const double scale = m.size() > 0 ? m.diagonal().cwiseAbs().maxCoeff() : 0.0;
  bool ok = llt.info() == Eigen::Success && scale > 0.0;
  if (ok) {
    // LLT accepts numerically rank-deficient matrices; guard the pivot size.
    const Vector d = llt.matrixLLT().diagonal();
    ok = (d.array().square() > 1e-13 * scale).all();
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    std::ostringstream msg;
    msg << "singular " << what << "; no information along direction ("
        << eig.eigenvectors().col(0).transpose().format(
               Eigen::IOFormat(6, Eigen::DontAlignCols, ", ", ", "))
        << ")";
    throw SingularDesignError(msg.str());
  }
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

Matrix info_time_fixed(const ApproximateDesign& tau, const TimeBasis& basis, double sigma_eps) {
  if (!(sigma_eps > 0.0)) throw ConfigurationError("sigma_eps must be > 0");
  return weighted_moments(tau.points(), tau.weights(), basis) / (sigma_eps * sigma_eps);
}

Matrix info_time_fixed(const ApproximateDesign& tau, const DegradationModel& model) {
  if (!model.homoscedastic()) {
    const double k = static_cast<double>(tau.size());
    for (double w : tau.weights()) {
      if (std::abs(w - 1.0 / k) > 1e-12) {
        throw ConfigurationError(
            "a full error covariance needs an exact plan with equal weights 1/k");
      }
    }
    return info_time_fixed_exact(tau.points(), model);
  }
  return info_time_fixed(tau, model.time_basis(), model.sigma_eps());
}

Matrix info_time_fixed_per_unit(std::span<const double> times, const DegradationModel& model) {
  const Matrix f2 = time_design_matrix(times, model.time_basis());
  if (model.homoscedastic()) {
    const double s = model.sigma_eps();
    return f2.transpose() * f2 / (s * s);
  }
  const Matrix& s = full_error(model, f2.rows());
  return f2.transpose() * Eigen::LLT<Matrix>(s).solve(f2);
}

Matrix info_time_fixed_exact(std::span<const double> times, const DegradationModel& model) {
  return info_time_fixed_per_unit(times, model) / static_cast<double>(times.size());
}

Matrix inv_info_time_mixed(const ApproximateDesign& tau, const DegradationModel& model) {
  return spd_inverse(info_time_fixed(tau, model), "time-plan information") +
         model.sigma_gamma();
}

Matrix inv_info_time_mixed_per_unit(std::span<const double> times,
                                    const DegradationModel& model) {
  return spd_inverse(info_time_fixed_per_unit(times, model), "time-plan information") +
         model.sigma_gamma();
}

CriterionReport c_criterion_time(const ApproximateDesign& tau, const DegradationModel& model,
                                 double t_star) {
  return make_report(spd_inverse(info_time_fixed(tau, model), "time-plan information"), model,
                     t_star);
}

CriterionReport c_criterion_time_exact(std::span<const double> times,
                                       const DegradationModel& model, double t_star) {
  return make_report(spd_inverse(info_time_fixed_exact(times, model), "time-plan information"),
                     model, t_star);
}

Matrix info_stress(const ApproximateDesign& xi, const StressBasis& basis) {
  Matrix m = Matrix::Zero(basis.dim(), basis.dim());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const Vector f = basis(xi.points()[i]);
    m.noalias() += xi.weights()[i] * f * f.transpose();
  }
  return m;
}

double stress_factor(const ApproximateDesign& xi, const DegradationModel& model) {
  const Vector f = model.stress_basis()(model.x_use());
  return f.dot(spd_inverse(info_stress(xi, model.stress_basis()), "stress information") * f);
}

CriterionReport avar_median(const ApproximateDesign& xi, const ApproximateDesign& tau,
                            const DegradationModel& model) {
  CriterionReport r = c_criterion_time(tau, model, design_target_time(0.5, model));
  const double sf = stress_factor(xi, model);
  r.stress_factor = sf;
  r.criterion_total *= sf;
  r.criterion_fixed *= sf;
  r.criterion_random *= sf;
  return r;
}

double efficiency(const ApproximateDesign& candidate, const ApproximateDesign& reference,
                  const DegradationModel& model, double t_star) {
  const double ref = c_criterion_time(reference, model, t_star).criterion_total;
  const double cand = c_criterion_time(candidate, model, t_star).criterion_total;
  return ref / cand;
}

double design_target_time(double alpha, const DegradationModel& model) {
  if (alpha != 0.5) {
    throw ConfigurationError(
        "design optimization is available for the median (alpha = 0.5) only; other quantiles "
        "depend on the information for the variance parameters, which is not modelled");
  }
  if (model.time_basis().is_affine()) return median_failure_time(model);
  const QuantileResult q = quantile(0.5, model);
  if (!q.exists) throw NoPositiveMedianError("median failure time does not exist");
  return q.t_alpha;
}

}  // namespace adt
