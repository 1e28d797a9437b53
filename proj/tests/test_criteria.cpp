#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "adtdesign/criteria.hpp"
#include "adtdesign/error.hpp"
#include "adtdesign/failure_time.hpp"
#include "adtdesign/time_plan.hpp"
#include "fixtures.hpp"

using namespace adt;

namespace {

DegradationModel random_model(std::mt19937_64& rng, int p2, int k) {
  std::normal_distribution<double> g;
  Vector beta(2 * p2);
  for (int i = 0; i < beta.size(); ++i) beta[i] = g(rng);
  const Matrix sg = fixtures::random_spd(rng, p2, 0.0) * 0.05;
  const Matrix se = fixtures::random_spd(rng, k, 0.05) * 0.01;
  return DegradationModel(StressBasis::affine(), TimeBasis::polynomial(p2 - 1), beta, sg,
                          FullErrorCovariance{se}, 0.0, 1.0);
}

std::vector<double> random_times(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(k);
  for (auto& v : t) v = u(rng);
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

TEST_CASE("mixed information inverse equals the decomposition") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pk(1, 3);
  for (int r = 0; r < 200; ++r) {
    const int p2 = pk(rng);
    const int k = std::max(p2, 2) + static_cast<int>(rng() % static_cast<unsigned>(9 - std::max(p2, 2)));
    const auto m = random_model(rng, p2, k);
    const auto t = random_times(rng, k);
    // Oracle: generalized least squares information from the marginal covariance.
    Matrix f(k, p2);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < p2; ++j) f(i, j) = std::pow(t[i], j);
    const Matrix se = std::get<FullErrorCovariance>(m.error()).sigma_eps;
    const Matrix v = f * m.sigma_gamma() * f.transpose() + se;
    const Matrix direct = (f.transpose() * v.inverse() * f).inverse();
    const Matrix lemma = inv_info_time_mixed_per_unit(t, m);
    CHECK((direct - lemma).norm() <= 1e-8 * direct.norm());
    CHECK((assemble_V(t, m) - v).norm() <= 1e-12 * v.norm());
  }
}

TEST_CASE("zero random effects reduce to the fixed inverse") {
  const auto m = fixtures::table1().with_sigma_gamma(Matrix::Zero(2, 2));
  const auto tau = fixtures::tau0();
  CHECK((inv_info_time_mixed(tau, m) - info_time_fixed(tau, m).inverse()).norm() < 1e-10);
}

TEST_CASE("moment examples") {
  const double s2 = 0.048 * 0.048;
  const auto one = ApproximateDesign({0.4}, {1.0});
  const Matrix m1 = info_time_fixed(one, TimeBasis::affine(), 0.048);
  CHECK(std::abs(m1.determinant()) < 1e-6);
  CHECK(m1(1, 1) * s2 == doctest::Approx(0.16));

  const Matrix m2 = info_time_fixed(ApproximateDesign::uniform({0.0, 1.0}), TimeBasis::affine(), 0.048) * s2;
  CHECK(m2(0, 0) == doctest::Approx(1.0));
  CHECK(m2(0, 1) == doctest::Approx(0.5));
  CHECK(m2(1, 1) == doctest::Approx(0.5));

  const Matrix m6 = info_time_fixed(fixtures::tau0(), TimeBasis::affine(), 0.048) * s2;
  CHECK(m6(0, 0) == doctest::Approx(1.0));
  CHECK(m6(0, 1) == doctest::Approx(0.5));
  CHECK(m6(1, 1) == doctest::Approx(0.454167).epsilon(1e-6));
}

TEST_CASE("random criterion and decomposition") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const CriterionReport r = c_criterion_time(fixtures::tau0(), m, t);
  const double s1 = 0.114, s2 = 0.105, rho = -0.143;
  const double oracle = s1 * s1 + 2 * rho * s1 * s2 * t + s2 * s2 * t * t;
  CHECK(r.criterion_random == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(r.criterion_random == doctest::Approx(0.035230).epsilon(1e-4));
  CHECK(std::abs(r.criterion_total - r.criterion_fixed - r.criterion_random) <=
        1e-12 * r.criterion_total);
  CHECK(r.criterion_total >= r.criterion_random);
  CHECK(r.criterion_total == doctest::Approx(0.050789).epsilon(2e-4));
}

TEST_CASE("one-point design with constant basis gives the error variance") {
  Vector beta(2);
  beta << 1.0, 0.5;
  const DegradationModel m(StressBasis::affine(), TimeBasis::polynomial(0), beta,
                           Matrix::Zero(1, 1), Homoscedastic{0.048}, 0.0, 3.0);
  const auto r = c_criterion_time(ApproximateDesign({0.3}, {1.0}), m, 2.0);
  CHECK(r.criterion_total == doctest::Approx(0.048 * 0.048));
}

TEST_CASE("avar factorizes into stress and time parts") {
  const auto m = fixtures::table1();
  const auto tau = fixtures::tau0();
  const ApproximateDesign xi1({0.0, 1.0}, {0.95, 0.05});
  const ApproximateDesign xi2({0.0, 1.0}, {0.5, 0.5});
  const Matrix m1 = info_stress(xi1, m.stress_basis());
  CHECK(m1(0, 0) == doctest::Approx(1.0));
  CHECK(m1(0, 1) == doctest::Approx(0.05));
  CHECK(m1(1, 1) == doctest::Approx(0.05));
  const auto a1 = avar_median(xi1, tau, m);
  const auto a2 = avar_median(xi2, tau, m);
  const double time_part = c_criterion_time(tau, m, median_failure_time(m)).criterion_total;
  CHECK(a1.criterion_total == doctest::Approx(*a1.stress_factor * time_part).epsilon(1e-12));
  CHECK(a1.criterion_total / a2.criterion_total ==
        doctest::Approx(*a1.stress_factor / *a2.stress_factor).epsilon(1e-12));
}

TEST_CASE("singular designs are rejected") {
  const auto m = fixtures::table1().with_sigma_gamma(Matrix::Zero(2, 2));
  const auto one = ApproximateDesign({0.5}, {1.0});
  CHECK_THROWS_AS(c_criterion_time(one, m, 1.5), SingularDesignError);
  CHECK_THROWS_WITH_AS(inv_info_time_mixed(one, m), doctest::Contains("direction"),
                       SingularDesignError);
}

TEST_CASE("efficiency against the optimum never exceeds one") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const GridSpec grid{20, 6};
  const TimePlan plan = optimize_time_plan(grid, m.time_basis(), m.sigma_eps(), t);
  REQUIRE(plan.certificate.certified);
  CHECK(efficiency(plan.design, plan.design, m, t) == doctest::Approx(1.0));

  std::mt19937_64 rng(77);
  const auto pts = grid.points();
  for (int r = 0; r < 100; ++r) {
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::size_t> pick(idx.begin(), idx.begin() + 6);
    std::sort(pick.begin(), pick.end());
    std::vector<double> sub;
    for (auto i : pick) sub.push_back(pts[i]);
    const auto tau = ApproximateDesign::uniform(sub);
    CHECK(efficiency(tau, plan.design, m, t) <= 1.0 + 1e-12);
  }
}

TEST_CASE("efficiency is scale free") {
  const auto m = fixtures::table1();
  const double t = median_failure_time(m);
  const auto tau2 = ApproximateDesign::uniform({0.0, 1.0});
  const double e1 = efficiency(fixtures::tau0(), tau2, m, t);
  // Scaling all variances by c^2 scales both criteria by c^2.
  const auto scaled = m.with_sigma_gamma(m.sigma_gamma() * 4.0).with_sigma_eps(0.096);
  CHECK(efficiency(fixtures::tau0(), tau2, scaled, t) == doctest::Approx(e1).epsilon(1e-12));
}

TEST_CASE("target time restricted to the median") {
  CHECK_THROWS_AS(design_target_time(0.1, fixtures::table1()), ConfigurationError);
}
