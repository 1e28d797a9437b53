#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

#include "adtdesign/criteria.hpp"
#include "adtdesign/destructive.hpp"
#include "adtdesign/error.hpp"
#include "adtdesign/failure_time.hpp"
#include "fixtures.hpp"

using namespace adt;

namespace {

double sd_oracle(double t) {
  const double s1 = 0.114, s2 = 0.105, rho = -0.143, se = 0.048;
  return std::sqrt(s1 * s1 + 2 * rho * s1 * s2 * t + s2 * s2 * t * t + se * se);
}

}  // namespace

TEST_CASE("variance function at the ends of the window") {
  const VarianceFunction var(fixtures::table1());
  CHECK(var.sd(0.0) == doctest::Approx(sd_oracle(0.0)).epsilon(1e-12));
  CHECK(var.sd(1.0) == doctest::Approx(sd_oracle(1.0)).epsilon(1e-12));
  CHECK(var.endpoint_ratio() == doctest::Approx(1.2234).epsilon(1e-4));
  const Vector g = weighted_f2(1.0, fixtures::table1());
  CHECK(g[0] == doctest::Approx(1.0 / sd_oracle(1.0)));
  CHECK(g[1] == doctest::Approx(1.0 / sd_oracle(1.0)));
}

TEST_CASE("degenerate variance is rejected") {
  const auto m = fixtures::table1().with_sigma_gamma(Matrix::Zero(2, 2));
  CHECK_NOTHROW(VarianceFunction{m});
  Matrix sg(2, 2);
  sg << 1.0, -1.0, -1.0, 1.0;
  Vector beta(4);
  beta << 1, 1, 1, 0;
  const DegradationModel flat(StressBasis::affine(), TimeBasis::affine(), beta, sg,
                              Homoscedastic{1e-300}, 0.0, 3.0);
  CHECK_THROWS_AS(VarianceFunction{flat}, DegenerateVarianceError);
}

TEST_CASE("optimal time weight") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const double r = sd_oracle(1.0) / sd_oracle(0.0);
  CHECK(elfving_time_weight(t, r) == doctest::Approx(t * r / (t * r + t - 1)).epsilon(1e-12));
  CHECK(elfving_time_design(m, t).weights()[1] == doctest::Approx(0.768455).epsilon(1e-5));
  CHECK(elfving_time_weight(1e6, r) == doctest::Approx(r / (1 + r)).epsilon(1e-5));
  CHECK(elfving_time_weight(1.0 + 1e-9, r) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(elfving_time_weight(3.0, 1.0) == doctest::Approx(0.6));
  CHECK_THROWS_AS(elfving_time_weight(1.0, r), OutOfRegimeError);
}

TEST_CASE("time weight is monotone in its arguments") {
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double t = 1.0 + 0.1 * i;
    const double w = elfving_time_weight(t, 1.2);
    CHECK(w < prev);
    prev = w;
  }
  prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double w = elfving_time_weight(2.0, 0.05 * i);
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("optimal stress weight") {
  const auto m = fixtures::table1();
  const auto xi = elfving_stress_design(m);
  REQUIRE(xi.size() == 2);
  CHECK(xi.points()[1] == 1.0);
  CHECK(xi.weights()[1] == doctest::Approx(0.056 / 1.112).epsilon(1e-12));
  Vector b = m.beta();
  const auto far = DegradationModel::affine(b, m.line_covariance(), 0.048, -1.0, 3.912);
  CHECK(elfving_stress_design(far).weights()[1] == doctest::Approx(1.0 / 3.0));
  const auto above = DegradationModel::affine(b, m.line_covariance(), 0.048, 2.0, 3.912);
  CHECK(elfving_stress_design(above).weights()[1] == doctest::Approx(2.0 / 3.0));
  const auto inside = DegradationModel::affine(b, m.line_covariance(), 0.048, 0.4, 3.912);
  CHECK_THROWS_AS(elfving_stress_design(inside), OutOfRegimeError);
}

TEST_CASE("product design weights") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const auto z = product_design(elfving_stress_design(m), elfving_time_design(m, t));
  REQUIRE(z.combined.size() == 4);
  const double w = 0.056 / 1.112;
  const double r = sd_oracle(1.0) / sd_oracle(0.0);
  const double p = t * r / (t * r + t - 1);
  CHECK(z.combined[0].weight == doctest::Approx((1 - w) * (1 - p)).epsilon(1e-12));
  CHECK(z.combined[1].weight == doctest::Approx((1 - w) * p).epsilon(1e-12));
  CHECK(z.combined[2].weight == doctest::Approx(w * (1 - p)).epsilon(1e-12));
  CHECK(z.combined[3].weight == doctest::Approx(w * p).epsilon(1e-12));
  CHECK(z.combined[0].weight == doctest::Approx(0.21988).epsilon(1e-4));
  CHECK(z.combined[1].weight == doctest::Approx(0.72976).epsilon(1e-4));
  CHECK(z.combined[2].weight == doctest::Approx(0.01166).epsilon(1e-3));
  CHECK(z.combined[3].weight == doctest::Approx(0.03870).epsilon(1e-3));
}

TEST_CASE("product information is the Kronecker product of the marginals") {
  std::mt19937_64 rng(21);
  for (int r = 0; r < 10; ++r) {
    const auto m = fixtures::random_affine(rng);
    const ApproximateDesign xi({0.0, 0.3, 1.0}, {0.2, 0.3, 0.5});
    const ApproximateDesign tau({0.0, 0.4, 0.7, 1.0}, {0.1, 0.2, 0.3, 0.4});
    const Matrix lhs = info_single_obs(product_design(xi, tau), m);
    const Matrix rhs = Eigen::kroneckerProduct(info_stress(xi, m.stress_basis()),
                                               info_time_weighted(tau, m)).eval();
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
  }
}

TEST_CASE("single-observation variance factorizes") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const auto xi = elfving_stress_design(m);
  const auto tau = elfving_time_design(m, t);
  const Vector c = m.time_basis()(t);
  const double time_part = c.dot(info_time_weighted(tau, m).inverse() * c);
  CHECK(avar_single_obs(product_design(xi, tau).combined, m, t) ==
        doctest::Approx(stress_factor(xi, m) * time_part).epsilon(1e-10));
}

TEST_CASE("endpoint design equalizes sensitivity at both ends") {
  std::mt19937_64 rng(31);
  for (int r = 0; r < 20; ++r) {
    const auto m = fixtures::random_affine(rng);
    const double t = median_failure_time(m);
    const auto tau = elfving_time_design(m, t);
    const Vector c = m.time_basis()(t);
    const Matrix inv = info_time_weighted(tau, m).inverse();
    const double crit = c.dot(inv * c);
    const double phi0 = std::pow(c.dot(inv * weighted_f2(0.0, m)), 2) / crit;
    const double phi1 = std::pow(c.dot(inv * weighted_f2(1.0, m)), 2) / crit;
    CHECK(phi0 == doctest::Approx(phi1).epsilon(1e-9));
    CHECK(phi1 == doctest::Approx(1.0).epsilon(1e-9));
    for (int i = 1; i < 50; ++i) {
      const double phi = std::pow(c.dot(inv * weighted_f2(i / 50.0, m)), 2) / crit;
      CHECK(phi <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("endpoint design matches brute force and the grid optimizer") {
  std::mt19937_64 rng(41);
  for (int r = 0; r < 5; ++r) {
    const auto m = fixtures::random_affine(rng);
    const double t = median_failure_time(m);
    const auto e = elfving_time_design(m, t);
    const auto b = elfving_brute_force_oracle(m, t, 101);
    REQUIRE(b.size() == 2);
    CHECK(b.points()[0] == 0.0);
    CHECK(b.points()[1] == 1.0);
    CHECK(b.weights()[1] == doctest::Approx(e.weights()[1]).epsilon(1e-9));
    const TimePlan plan = destructive_time_plan_numeric(m, t, 200);
    CHECK(plan.certificate.certified);
    CHECK(plan.design.weights().back() == doctest::Approx(e.weights()[1]).epsilon(1e-5));
    CHECK(time_efficiency_single_obs(plan.design, e, m, t) == doctest::Approx(1.0).epsilon(1e-8));
  }
}
