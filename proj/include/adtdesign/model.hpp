#pragma once

#include <Eigen/Dense>

#include <span>
#include <variant>
#include <vector>

namespace adt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Polynomial regression basis (1, t, ..., t^d) in the standardized time t.
/// Degree 1 is the straight-line case used throughout the worked examples.
class TimeBasis {
 public:
  static TimeBasis affine() { return TimeBasis(1); }
  static TimeBasis polynomial(int degree) { return TimeBasis(degree); }

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  bool is_affine() const { return degree_ == 1; }
  Vector operator()(double t) const;

  bool operator==(const TimeBasis&) const = default;

 private:
  explicit TimeBasis(int degree);
  int degree_;
};

/// Polynomial basis in a single standardized stress variable x; f(x)_1 == 1.
class StressBasis {
 public:
  static StressBasis affine() { return StressBasis(1); }
  static StressBasis polynomial(int degree) { return StressBasis(degree); }

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  bool is_affine() const { return degree_ == 1; }
  Vector operator()(double x) const;

  bool operator==(const StressBasis&) const = default;

 private:
  explicit StressBasis(int degree);
  int degree_;
};

struct Homoscedastic {
  double sigma_eps;
};

/// Full within-unit error covariance for an exact design with k time points.
struct FullErrorCovariance {
  Matrix sigma_eps;
};

using ErrorSpec = std::variant<Homoscedastic, FullErrorCovariance>;

/// Random-effect covariance of a straight-line path in (sigma1, sigma2, rho) form.
struct RandomLineCovariance {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;

  Matrix matrix() const;
};

/// Linear mixed-effects degradation model with product-type regression
/// f(x, t) = f1(x) (x) f2(t). Fixed effects are stored lexicographically:
/// beta[(r - 1) * p2 + (s - 1)] is the coefficient of f1_r(x) f2_s(t).
class DegradationModel {
 public:
  DegradationModel(StressBasis stress_basis, TimeBasis time_basis, Vector beta,
                   Matrix sigma_gamma, ErrorSpec error, double x_use, double y0);

  /// Straight lines in stress and time, Sigma_gamma built from (sigma1, sigma2, rho).
  static DegradationModel affine(const Vector& beta, RandomLineCovariance cov,
                                 double sigma_eps, double x_use, double y0);

  const StressBasis& stress_basis() const { return stress_basis_; }
  const TimeBasis& time_basis() const { return time_basis_; }
  const Vector& beta() const { return beta_; }
  const Matrix& sigma_gamma() const { return sigma_gamma_; }
  const ErrorSpec& error() const { return error_; }
  double x_use() const { return x_use_; }
  double y0() const { return y0_; }

  int p1() const { return stress_basis_.dim(); }
  int p2() const { return time_basis_.dim(); }

  bool homoscedastic() const { return std::holds_alternative<Homoscedastic>(error_); }
  /// sigma_eps of a homoscedastic model; throws ConfigurationError otherwise.
  double sigma_eps() const;

  /// (sigma1, sigma2, rho) view of a 2x2 Sigma_gamma.
  RandomLineCovariance line_covariance() const;

  DegradationModel with_sigma_gamma(Matrix sigma_gamma) const;
  DegradationModel with_sigma_eps(double sigma_eps) const;
  DegradationModel with_beta(Vector beta) const;
  DegradationModel with_y0(double y0) const;

 private:
  StressBasis stress_basis_;
  TimeBasis time_basis_;
  Vector beta_;
  Matrix sigma_gamma_;
  ErrorSpec error_;
  double x_use_;
  double y0_;
};

/// Points with weights on the standardized region [0, 1].
class ApproximateDesign {
 public:
  ApproximateDesign(std::vector<double> points, std::vector<double> weights);

  /// Equal weights 1/n on the given points.
  static ApproximateDesign uniform(std::vector<double> points);

  std::span<const double> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return points_.size(); }
  /// Number of points with strictly positive weight.
  std::size_t support_size() const;

  /// Copy without zero-weight points.
  ApproximateDesign trimmed(double zero_tol = 0.0) const;

  bool operator==(const ApproximateDesign&) const = default;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

/// delta_s = sum_r f1_r(x_u) beta_rs: coefficients of the mean path at use stress.
Vector eval_delta(const DegradationModel& model);

/// Lexicographic Kronecker product, (a (x) b)[i * n + j] = a[i] * b[j].
Vector kron_vec(const Vector& a, const Vector& b);

/// Rows f2(t_j)^T for the given time points.
Matrix time_design_matrix(std::span<const double> times, const TimeBasis& basis);

/// Per-unit covariance V = F2 Sigma_gamma F2^T + Sigma_eps for one unit
/// measured at the given distinct time points.
Matrix assemble_V(std::span<const double> times, const DegradationModel& model);

}  // namespace adt
