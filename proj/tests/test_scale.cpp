#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "msh/rng.hpp"
#include "msh/scale.hpp"

TEST_CASE("inverse normal cdf against externally computed quantiles") {
  // Reference values from an independent implementation (double precision).
  CHECK(msh::inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(msh::inverse_normal_cdf(5.0 / 6.0) - 0.967421566101701) < 1e-9);
  CHECK(std::abs(msh::inverse_normal_cdf(0.975) - 1.959963984540054) < 1e-9);
  CHECK(std::abs(msh::inverse_normal_cdf(0.7) - 0.5244005127080407) < 1e-9);
  CHECK(std::abs(msh::inverse_normal_cdf(0.999) - 3.090232306167813) < 1e-9);
}

TEST_CASE("inverse normal cdf symmetry and monotonicity") {
  for (double p : {0.51, 0.6, 0.75, 0.9, 0.99, 0.9999})
    CHECK(msh::inverse_normal_cdf(p) ==
          doctest::Approx(-msh::inverse_normal_cdf(1.0 - p)).epsilon(1e-10));
  double prev = msh::inverse_normal_cdf(0.01);
  for (double p = 0.02; p < 1.0; p += 0.01) {
    const double q = msh::inverse_normal_cdf(p);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("inverse normal cdf boundary and domain handling") {
  // Exact endpoints map to the infinite quantiles; beyond them is an error.
  CHECK(std::isinf(msh::inverse_normal_cdf(0.0)));
  CHECK(msh::inverse_normal_cdf(0.0) < 0.0);
  CHECK(std::isinf(msh::inverse_normal_cdf(1.0)));
  CHECK(msh::inverse_normal_cdf(1.0) > 0.0);
  CHECK_THROWS_AS(msh::inverse_normal_cdf(-0.5), msh::Error);
  CHECK_THROWS_AS(msh::inverse_normal_cdf(1.5), msh::Error);
}

TEST_CASE("kth smallest is the order statistic, input preserved") {
  Eigen::VectorXd v(5);
  v << 5, 1, 4, 2, 3;
  const Eigen::VectorXd before = v;
  CHECK(msh::kth_smallest(v, 1) == 1.0);
  CHECK(msh::kth_smallest(v, 3) == 3.0);
  CHECK(msh::kth_smallest(v, 5) == 5.0);
  CHECK((v - before).norm() == 0.0);
  CHECK_THROWS_AS(msh::kth_smallest(v, 0), msh::Error);
  CHECK_THROWS_AS(msh::kth_smallest(v, 6), msh::Error);
}

TEST_CASE("scale estimate walks a small residual set to the inlier population") {
  // Hand-traced: nu starts at 5, s = 0.2 / Phi^-1(0.7) ~ 0.3814 captures
  // {0.1, 0.2, 0.3}; the refit s = 0.2 / Phi^-1(5/6) leaves nu = 3 fixed.
  Eigen::VectorXd r(5);
  r << 0.1, 0.2, 0.3, 5.0, 6.0;
  const auto est = msh::ikose(r, 2, 2.5);
  CHECK(std::abs(est.scale - 0.20673510598478315) < 1e-9);
  CHECK(est.inlier_count == 3);
  CHECK(est.iterations >= 1);
  CHECK(est.iterations <= 50);
}

TEST_CASE("scale estimate is equivariant under residual scaling") {
  msh::Rng rng(41);
  Eigen::VectorXd r(300);
  for (int i = 0; i < 300; ++i) r(i) = std::abs(rng.normal(0.0, 1.0));
  for (int i = 250; i < 300; ++i) r(i) += 20.0;  // a far tail
  const auto base = msh::ikose(r, 10, 2.5);
  for (double c : {0.5, 3.0, 117.0}) {
    const auto scaled = msh::ikose(c * r, 10, 2.5);
    CHECK(scaled.scale == doctest::Approx(c * base.scale).epsilon(1e-12));
    CHECK(scaled.inlier_count == base.inlier_count);
  }
}

TEST_CASE("scale estimate recovers the noise level of a pure gaussian sample") {
  // With every point an inlier the quantile argument is near 1/2, so the
  // relative error of the estimate tracks that of r_(K) (about 1/sqrt(K)).
  // K = 100 keeps it near 10%; a 20% band is then reliable.
  msh::Rng rng(42);
  const double sigma = 2.0;
  Eigen::VectorXd r(10000);
  for (int i = 0; i < 10000; ++i) r(i) = std::abs(rng.normal(0.0, sigma));
  const auto est = msh::ikose(r, 100, 2.5);
  CHECK(est.scale > 0.8 * sigma);
  CHECK(est.scale < 1.2 * sigma);
}

TEST_CASE("scale estimate recovery holds across K choices") {
  msh::Rng rng(43);
  Eigen::VectorXd r(10000);
  for (int i = 0; i < 10000; ++i) r(i) = std::abs(rng.normal(0.0, 1.0));
  for (int K : {5, 10, 50, 100}) {
    const auto est = msh::ikose(r, K, 2.5);
    // Small K rides the noisy extreme order statistics; widen its band.
    const double slack = K < 50 ? 0.5 : 0.2;
    CHECK(est.scale > 1.0 - slack);
    CHECK(est.scale < 1.0 + slack);
  }
}

TEST_CASE("contaminated sample converges to the inlier scale") {
  msh::Rng rng(44);
  Eigen::VectorXd r(1000);
  for (int i = 0; i < 700; ++i) r(i) = std::abs(rng.normal(0.0, 1.0));
  for (int i = 700; i < 1000; ++i) r(i) = rng.uniform(50.0, 500.0);
  const auto est = msh::ikose(r, 10, 2.5);
  CHECK(est.scale < 2.0);  // outlier block must not inflate the estimate
  CHECK(est.inlier_count >= 500);
  CHECK(est.inlier_count <= 760);
}

TEST_CASE("zero k-th residual is degenerate") {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(10);
  CHECK_THROWS_AS(msh::ikose(r, 2, 2.5), msh::DegenerateScale);
  Eigen::VectorXd mixed(4);
  mixed << 0.0, 0.0, 1.0, 2.0;
  CHECK_THROWS_AS(msh::ikose(mixed, 2, 2.5), msh::DegenerateScale);
}

TEST_CASE("inlier population collapsing to K is degenerate") {
  // One tight pair and a far tail: the cutoff around r_(2) keeps only the
  // pair, nu = K = 2 puts the quantile argument at 1.
  Eigen::VectorXd r(5);
  r << 0.01, 0.02, 100.0, 200.0, 300.0;
  CHECK_THROWS_AS(msh::ikose(r, 2, 2.5), msh::DegenerateScale);
}

TEST_CASE("K beyond the sample size is rejected") {
  Eigen::VectorXd r(3);
  r << 1, 2, 3;
  CHECK_THROWS_AS(msh::ikose(r, 4, 2.5), msh::Error);
  CHECK_THROWS_AS(msh::ikose(r, 0, 2.5), msh::Error);
}
