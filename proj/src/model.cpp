#include "adtdesign/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adtdesign/error.hpp"

namespace adt {

namespace {

Vector monomials(double v, int degree) {
  Vector out(degree + 1);
  double p = 1.0;
  for (int i = 0; i <= degree; ++i) {
    out[i] = p;
    p *= v;
  }
  return out;
}

void check_symmetric_psd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw ConfigurationError(std::string(name) + " must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ConfigurationError(std::string(name) + " must be symmetric");
  }
  if (m.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw ConfigurationError(std::string(name) + " must be non-negative definite");
  }
}

}  // namespace

TimeBasis::TimeBasis(int degree) : degree_(degree) {
  if (degree < 0) throw ConfigurationError("time basis degree must be >= 0");
}

Vector TimeBasis::operator()(double t) const { return monomials(t, degree_); }

StressBasis::StressBasis(int degree) : degree_(degree) {
  if (degree < 0) throw ConfigurationError("stress basis degree must be >= 0");
}

Vector StressBasis::operator()(double x) const { return monomials(x, degree_); }

Matrix RandomLineCovariance::matrix() const {
  if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0)) {
    throw ConfigurationError("sigma_gamma: sigma1 and sigma2 must be >= 0");
  }
  if (!(std::abs(rho) <= 1.0)) {
    throw ConfigurationError("sigma_gamma.rho out of [-1,1]");
  }
  Matrix m(2, 2);
  const double off = rho * sigma1 * sigma2;
  m << sigma1 * sigma1, off, off, sigma2 * sigma2;
  return m;
}

DegradationModel::DegradationModel(StressBasis stress_basis, TimeBasis time_basis,
                                   Vector beta, Matrix sigma_gamma, ErrorSpec error,
                                   double x_use, double y0)
    : stress_basis_(stress_basis),
      time_basis_(time_basis),
      beta_(std::move(beta)),
      sigma_gamma_(std::move(sigma_gamma)),
      error_(std::move(error)),
      x_use_(x_use),
      y0_(y0) {
  const auto p = static_cast<Eigen::Index>(p1()) * p2();
  if (beta_.size() != p) {
    throw ConfigurationError("beta has " + std::to_string(beta_.size()) +
                             " entries, expected p1*p2 = " + std::to_string(p));
  }
  if (!beta_.allFinite()) throw ConfigurationError("beta must be finite");
  if (sigma_gamma_.rows() != p2()) {
    throw ConfigurationError("sigma_gamma must be " + std::to_string(p2()) + "x" +
                             std::to_string(p2()));
  }
  check_symmetric_psd(sigma_gamma_, "sigma_gamma");
  if (const auto* h = std::get_if<Homoscedastic>(&error_)) {
    if (!(h->sigma_eps > 0.0) || !std::isfinite(h->sigma_eps)) {
      throw ConfigurationError("sigma_eps must be > 0");
    }
  } else {
    const Matrix& s = std::get<FullErrorCovariance>(error_).sigma_eps;
    check_symmetric_psd(s, "sigma_eps");
    if (s.size() == 0 || Eigen::LLT<Matrix>(s).info() != Eigen::Success) {
      throw ConfigurationError("sigma_eps must be positive definite");
    }
  }
  if (!std::isfinite(x_use_)) throw ConfigurationError("x_u must be finite");
  if (!std::isfinite(y0_)) throw ConfigurationError("y0 must be finite");
}

DegradationModel DegradationModel::affine(const Vector& beta, RandomLineCovariance cov,
                                          double sigma_eps, double x_use, double y0) {
  return DegradationModel(StressBasis::affine(), TimeBasis::affine(), beta, cov.matrix(),
                          Homoscedastic{sigma_eps}, x_use, y0);
}

double DegradationModel::sigma_eps() const {
  if (const auto* h = std::get_if<Homoscedastic>(&error_)) return h->sigma_eps;
  throw ConfigurationError("operation requires homoscedastic errors");
}

RandomLineCovariance DegradationModel::line_covariance() const {
  if (p2() != 2) throw ConfigurationError("(sigma1, sigma2, rho) requires an affine time basis");
  RandomLineCovariance c;
  c.sigma1 = std::sqrt(sigma_gamma_(0, 0));
  c.sigma2 = std::sqrt(sigma_gamma_(1, 1));
  const double denom = c.sigma1 * c.sigma2;
  c.rho = denom > 0.0 ? sigma_gamma_(0, 1) / denom : 0.0;
  return c;
}

DegradationModel DegradationModel::with_sigma_gamma(Matrix sigma_gamma) const {
  return DegradationModel(stress_basis_, time_basis_, beta_, std::move(sigma_gamma), error_,
                          x_use_, y0_);
}

DegradationModel DegradationModel::with_sigma_eps(double sigma_eps) const {
  return DegradationModel(stress_basis_, time_basis_, beta_, sigma_gamma_,
                          Homoscedastic{sigma_eps}, x_use_, y0_);
}

DegradationModel DegradationModel::with_beta(Vector beta) const {
  return DegradationModel(stress_basis_, time_basis_, std::move(beta), sigma_gamma_, error_,
                          x_use_, y0_);
}

DegradationModel DegradationModel::with_y0(double y0) const {
  return DegradationModel(stress_basis_, time_basis_, beta_, sigma_gamma_, error_, x_use_, y0);
}

ApproximateDesign::ApproximateDesign(std::vector<double> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) throw ConfigurationError("design has no points");
  if (points_.size() != weights_.size()) {
    throw ConfigurationError("design points and weights differ in length");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i] >= 0.0 && points_[i] <= 1.0)) {
      throw ConfigurationError("design point " + std::to_string(points_[i]) +
                               " outside [0,1]");
    }
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw ConfigurationError("design points must be strictly increasing");
    }
    if (!(weights_[i] >= 0.0)) throw ConfigurationError("design weights must be >= 0");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigurationError("design weights sum to " + std::to_string(total) + ", not 1");
  }
}

ApproximateDesign ApproximateDesign::uniform(std::vector<double> points) {
  const double w = 1.0 / static_cast<double>(points.size());
  std::vector<double> weights(points.size(), w);
  // Absorb the rounding residue so the sum check holds for any n.
  if (!weights.empty()) {
    weights.back() = 1.0 - w * static_cast<double>(points.size() - 1);
  }
  return ApproximateDesign(std::move(points), std::move(weights));
}

std::size_t ApproximateDesign::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > 0.0; }));
}

ApproximateDesign ApproximateDesign::trimmed(double zero_tol) const {
  std::vector<double> p;
  std::vector<double> w;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (weights_[i] > zero_tol) {
      p.push_back(points_[i]);
      w.push_back(weights_[i]);
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return ApproximateDesign(std::move(p), std::move(w));
}

Vector eval_delta(const DegradationModel& model) {
  const Vector f1 = model.stress_basis()(model.x_use());
  const int p1 = model.p1();
  const int p2 = model.p2();
  Vector delta = Vector::Zero(p2);
  for (int r = 0; r < p1; ++r) {
    for (int s = 0; s < p2; ++s) delta[s] += f1[r] * model.beta()[r * p2 + s];
  }
  return delta;
}

Vector kron_vec(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

Matrix time_design_matrix(std::span<const double> times, const TimeBasis& basis) {
  Matrix f(static_cast<Eigen::Index>(times.size()), basis.dim());
  for (std::size_t j = 0; j < times.size(); ++j) {
    f.row(static_cast<Eigen::Index>(j)) = basis(times[j]).transpose();
  }
  return f;
}

Matrix assemble_V(std::span<const double> times, const DegradationModel& model) {
  const auto k = static_cast<Eigen::Index>(times.size());
  if (k == 0) throw ConfigurationError("assemble_V needs at least one time point");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!(times[j] >= 0.0 && times[j] <= 1.0)) {
      throw ConfigurationError("time point outside [0,1]");
    }
    for (std::size_t i = 0; i < j; ++i) {
      if (times[i] == times[j]) throw ConfigurationError("time points must be distinct");
    }
  }
  const Matrix f2 = time_design_matrix(times, model.time_basis());
  Matrix v = f2 * model.sigma_gamma() * f2.transpose();
  if (const auto* h = std::get_if<Homoscedastic>(&model.error())) {
    v.diagonal().array() += h->sigma_eps * h->sigma_eps;
  } else {
    const Matrix& s = std::get<FullErrorCovariance>(model.error()).sigma_eps;
    if (s.rows() != k) {
      throw ConfigurationError("sigma_eps is " + std::to_string(s.rows()) + "x" +
                               std::to_string(s.rows()) + " but " + std::to_string(k) +
                               " time points were given");
    }
    v += s;
  }
  return 0.5 * (v + v.transpose());
}

}  // namespace adt
