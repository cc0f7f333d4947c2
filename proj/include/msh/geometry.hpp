#pragma once

#include <Eigen/Dense>
#include <string>

#include "msh/errors.hpp"

namespace msh {

enum class ModelKind { Line2D, Circle2D, Line3D, Homography, Fundamental };

// Number of points in a minimal subset.
int minimal_size(ModelKind kind) noexcept;

// Dimensionality of one data row (4 = point-correspondence models).
int ambient_dim(ModelKind kind) noexcept;

const char* kind_name(ModelKind kind) noexcept;
ModelKind kind_from_name(const std::string& name);

// Parameter layout by kind:
//   Line2D       (a, b, c) with a^2 + b^2 = 1, line ax + by + c = 0
//   Circle2D     (cx, cy, r) with r > 0
//   Line3D       (px, py, pz, dx, dy, dz) point + unit direction
//   Homography   9 row-major entries, unit Frobenius norm, sign fixed so the
//                entry of largest magnitude is positive
//   Fundamental  9 row-major entries, unit Frobenius norm, rank 2, same sign
//                convention
struct ModelParams {
  ModelKind kind;
  Eigen::VectorXd theta;
};

// Checks the normalization invariants above.
bool params_valid(const ModelParams& params, double tol = 1e-9);

// Exact fit to a minimal subset (rows = points). Throws DegenerateSubset when
// the subset does not determine a model and InsufficientPoints on short input.
ModelParams fit_minimal(ModelKind kind, const Eigen::Ref<const Eigen::MatrixXd>& subset);

// Least-squares fit over any number of points >= minimal size. Algebraic for
// Circle2D (Kasa), total least squares for lines, normalized DLT / 8-point
// for the correspondence models.
ModelParams fit_least_squares(ModelKind kind, const Eigen::Ref<const Eigen::MatrixXd>& points);

// Point-to-model residual; nonnegative, zero exactly on the model. Sampson
// approximations for Homography and Fundamental.
double residual(const ModelParams& params, const Eigen::Ref<const Eigen::RowVectorXd>& point);

// Residuals of every row of points.
Eigen::VectorXd residuals(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& points);

}  // namespace msh
