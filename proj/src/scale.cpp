#include "msh/scale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace msh {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error("inverse_normal_cdf: p outside [0, 1]");
  }
  // Acklam's rational approximation.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF 0.5*erfc(-x/sqrt(2)).
  static const double sqrt2 = std::sqrt(2.0);
  static const double sqrt2pi = std::sqrt(2.0 * 3.141592653589793238462643383279502884);
  const double err = 0.5 * std::erfc(-x / sqrt2) - p;
  const double u = err * sqrt2pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double kth_smallest(const Eigen::Ref<const Eigen::VectorXd>& values, int k) {
  if (k < 1 || k > values.size())
    throw Error("kth_smallest: k out of range");
  std::vector<double> buf(static_cast<size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) buf[static_cast<size_t>(i)] = values(i);
  std::nth_element(buf.begin(), buf.begin() + (k - 1), buf.end());
  return buf[static_cast<size_t>(k - 1)];
}

ScaleEstimate ikose(const Eigen::Ref<const Eigen::VectorXd>& residuals, int K, double E) {
  const auto n = residuals.size();
  if (K < 1) throw Error("ikose: K must be >= 1");
  if (E <= 0.0) throw Error("ikose: E must be > 0");
  if (n < K) throw Error("ikose: fewer residuals than K");

  const double rk = kth_smallest(residuals, K);
  if (!(rk > 0.0)) throw DegenerateScale("K-th smallest residual is zero");

  const auto count_within = [&](double cutoff) {
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (residuals(i) <= cutoff) ++count;
    return count;
  };

  int nu = static_cast<int>(n);
  constexpr int kMaxIterations = 50;
  for (int it = 1; it <= kMaxIterations; ++it) {
    if (nu <= K)
      throw DegenerateScale("inlier estimate collapsed to K or below");
    const double s = rk / inverse_normal_cdf(0.5 * (1.0 + static_cast<double>(K) / nu));
    const int nu_next = count_within(E * s);
    if (nu_next == nu) return {s, nu, it};
    nu = nu_next;
  }
  // Iteration cap: report the scale at the last population estimate.
  if (nu <= K)
    throw DegenerateScale("inlier estimate collapsed to K or below");
  const double s = rk / inverse_normal_cdf(0.5 * (1.0 + static_cast<double>(K) / nu));
  return {s, nu, kMaxIterations};
}

}  // namespace msh
