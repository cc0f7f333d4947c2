#pragma once

#include <Eigen/Dense>

#include "msh/errors.hpp"

namespace msh {

// Quantile function of the standard normal. Rational approximation refined by
// one Halley step on erfc; absolute error well under 1e-9 on (0, 1).
double inverse_normal_cdf(double p);

// K-th smallest entry (K is 1-based). Does not modify the input.
double kth_smallest(const Eigen::Ref<const Eigen::VectorXd>& values, int k);

struct ScaleEstimate {
  double scale = 0.0;   // > 0
  int inlier_count = 0; // converged population estimate, >= K
  int iterations = 0;   // scale updates performed (capped at 50)
};

// Iterative K-th ordered scale estimate of nonnegative residuals.
//   s(nu) = r_(K) / Phi^{-1}((1 + K/nu) / 2)
// starting from nu = count(residuals) and iterating
//   nu <- #{ r_i <= E * s(nu) }
// until nu is unchanged or 50 updates elapsed. Throws DegenerateScale when
// r_(K) is zero or nu falls to K or below (the quantile argument reaches 1).
ScaleEstimate ikose(const Eigen::Ref<const Eigen::VectorXd>& residuals, int K, double E);

}  // namespace msh
