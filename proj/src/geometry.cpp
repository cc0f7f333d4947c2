#include "msh/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace msh {
namespace {

constexpr double kTiny = 1e-12;

void check_input(ModelKind kind, const Eigen::Ref<const Eigen::MatrixXd>& pts, bool minimal) {
  if (pts.cols() != ambient_dim(kind))
    throw DimensionMismatch("point dimension " + std::to_string(pts.cols()) +
                            " does not match model " + kind_name(kind));
  const Eigen::Index need = minimal_size(kind);
  if (pts.rows() < need)
    throw InsufficientPoints(std::string(kind_name(kind)) + " needs " +
                             std::to_string(need) + " points, got " +
                             std::to_string(pts.rows()));
  if (minimal && pts.rows() != need)
    throw Error("minimal fit expects exactly the minimal subset");
}

// Coordinate magnitude scale of a subset, used to make degeneracy thresholds
// relative instead of absolute.
double coord_scale(const Eigen::Ref<const Eigen::MatrixXd>& pts) {
  return 1.0 + pts.cwiseAbs().maxCoeff();
}

ModelParams line2d_from_points(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, double scale) {
  const Eigen::Vector2d d = p1 - p0;
  const double len = d.norm();
  if (len <= kTiny * scale) throw DegenerateSubset("coincident points for line");
  // Normal form: normal = rotate(d, 90deg) / |d|.
  const double a = -d.y() / len;
  const double b = d.x() / len;
  const double c = -(a * p0.x() + b * p0.y());
  ModelParams m{ModelKind::Line2D, Eigen::Vector3d(a, b, c)};
  return m;
}

ModelParams line3d_from_points(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1, double scale) {
  const Eigen::Vector3d d = p1 - p0;
  const double len = d.norm();
  if (len <= kTiny * scale) throw DegenerateSubset("coincident points for line");
  Eigen::VectorXd theta(6);
  theta << p0, d / len;
  return {ModelKind::Line3D, theta};
}

ModelParams circle_from_points(const Eigen::Ref<const Eigen::MatrixXd>& pts) {
  const Eigen::Vector2d p0 = pts.row(0).transpose();
  const Eigen::Vector2d p1 = pts.row(1).transpose();
  const Eigen::Vector2d p2 = pts.row(2).transpose();
  const Eigen::Vector2d u = p1 - p0, v = p2 - p0;
  const double cross = u.x() * v.y() - u.y() * v.x();
  const double scale = coord_scale(pts);
  if (std::abs(cross) <= kTiny * scale * scale)
    throw DegenerateSubset("collinear points for circle");
  // Circumcenter from the two chord bisector equations.
  const double u2 = u.squaredNorm(), v2 = v.squaredNorm();
  const double cx = (v.y() * u2 - u.y() * v2) / (2.0 * cross);
  const double cy = (u.x() * v2 - v.x() * u2) / (2.0 * cross);
  const Eigen::Vector2d center = p0 + Eigen::Vector2d(cx, cy);
  const double r = (p0 - center).norm();
  if (!(r > 0.0) || !std::isfinite(r)) throw DegenerateSubset("degenerate circumcircle");
  return {ModelKind::Circle2D, Eigen::Vector3d(center.x(), center.y(), r)};
}

// Similarity that moves points to centroid 0 and mean distance sqrt(2).
Eigen::Matrix3d hartley_normalization(const Eigen::Ref<const Eigen::MatrixXd>& xy) {
  const Eigen::RowVector2d centroid = xy.colwise().mean();
  const double mean_dist = (xy.rowwise() - centroid).rowwise().norm().mean();
  const double s = mean_dist > kTiny ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d T;
  T << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return T;
}

Eigen::MatrixXd apply_h(const Eigen::Matrix3d& T, const Eigen::Ref<const Eigen::MatrixXd>& xy) {
  Eigen::MatrixXd out(xy.rows(), 2);
  for (Eigen::Index i = 0; i < xy.rows(); ++i) {
    const Eigen::Vector3d p = T * Eigen::Vector3d(xy(i, 0), xy(i, 1), 1.0);
    out(i, 0) = p.x() / p.z();
    out(i, 1) = p.y() / p.z();
  }
  return out;
}

// Smallest right singular vector of A.
Eigen::VectorXd null_vector(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  return svd.matrixV().col(A.cols() - 1);
}

// Unit Frobenius norm with the largest-magnitude entry positive; makes the
// scale ambiguity deterministic.
void normalize_projective(Eigen::VectorXd& theta) {
  const double norm = theta.norm();
  if (norm <= kTiny) throw DegenerateSubset("zero projective parameters");
  theta /= norm;
  Eigen::Index imax = 0;
  theta.cwiseAbs().maxCoeff(&imax);
  if (theta(imax) < 0.0) theta = -theta;
}

bool has_collinear_triple(const Eigen::Ref<const Eigen::MatrixXd>& xy, double scale) {
  const Eigen::Index n = xy.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Eigen::Vector2d u = xy.row(j) - xy.row(i);
        const Eigen::Vector2d v = xy.row(k) - xy.row(i);
        if (std::abs(u.x() * v.y() - u.y() * v.x()) <= 1e-9 * scale * scale) return true;
      }
  return false;
}

ModelParams homography_dlt(const Eigen::Ref<const Eigen::MatrixXd>& corr, bool minimal) {
  const Eigen::Index n = corr.rows();
  const auto src = corr.leftCols<2>();
  const auto dst = corr.rightCols<2>();
  const double scale = coord_scale(corr);
  // A minimal subset with three collinear source or target points cannot pin
  // down the map; larger least-squares systems are left to the rank check.
  if (minimal && (has_collinear_triple(src, scale) || has_collinear_triple(dst, scale)))
    throw DegenerateSubset("collinear triple in homography subset");

  const Eigen::Matrix3d Ts = hartley_normalization(src);
  const Eigen::Matrix3d Td = hartley_normalization(dst);
  const Eigen::MatrixXd s = apply_h(Ts, src);
  const Eigen::MatrixXd d = apply_h(Td, dst);

  Eigen::MatrixXd A(2 * n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s(i, 0), y = s(i, 1), xp = d(i, 0), yp = d(i, 1);
    A.row(2 * i) << 0, 0, 0, -x, -y, -1, yp * x, yp * y, yp;
    A.row(2 * i + 1) << x, y, 1, 0, 0, 0, -xp * x, -xp * y, -xp;
  }
  const Eigen::VectorXd h = null_vector(A);
  Eigen::Matrix3d Hn;
  Hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d H = Td.inverse() * Hn * Ts;
  if (std::abs(H.determinant()) <= kTiny) throw DegenerateSubset("singular homography");

  Eigen::VectorXd theta(9);
  theta << H(0, 0), H(0, 1), H(0, 2), H(1, 0), H(1, 1), H(1, 2), H(2, 0), H(2, 1), H(2, 2);
  normalize_projective(theta);
  return {ModelKind::Homography, theta};
}

ModelParams fundamental_8pt(const Eigen::Ref<const Eigen::MatrixXd>& corr) {
  const Eigen::Index n = corr.rows();
  const auto src = corr.leftCols<2>();
  const auto dst = corr.rightCols<2>();

  const Eigen::Matrix3d Ts = hartley_normalization(src);
  const Eigen::Matrix3d Td = hartley_normalization(dst);
  const Eigen::MatrixXd s = apply_h(Ts, src);
  const Eigen::MatrixXd d = apply_h(Td, dst);

  Eigen::MatrixXd A(n, 9);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = s(i, 0), y = s(i, 1), xp = d(i, 0), yp = d(i, 1);
    A.row(i) << xp * x, xp * y, xp, yp * x, yp * y, yp, x, y, 1;
  }
  {
    // Rank below 8 leaves a multi-dimensional null space: no unique epipolar
    // geometry (repeated or otherwise degenerate correspondences).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const auto& sv = svd.singularValues();
    if (sv(0) <= kTiny || sv(std::min<Eigen::Index>(7, sv.size() - 1)) <= 1e-9 * sv(0))
      throw DegenerateSubset("rank-deficient correspondences for fundamental matrix");
  }
  const Eigen::VectorXd f = null_vector(A);
  Eigen::Matrix3d Fn;
  Fn << f(0), f(1), f(2), f(3), f(4), f(5), f(6), f(7), f(8);

  // Closest rank-2 matrix, then undo the normalization.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(Fn, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d sv = svd.singularValues();
  sv(2) = 0.0;
  const Eigen::Matrix3d F = Td.transpose() * (svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose()) * Ts;

  Eigen::VectorXd theta(9);
  theta << F(0, 0), F(0, 1), F(0, 2), F(1, 0), F(1, 1), F(1, 2), F(2, 0), F(2, 1), F(2, 2);
  normalize_projective(theta);
  return {ModelKind::Fundamental, theta};
}

Eigen::Matrix3d as_matrix3(const Eigen::VectorXd& theta) {
  Eigen::Matrix3d M;
  M << theta(0), theta(1), theta(2), theta(3), theta(4), theta(5), theta(6), theta(7), theta(8);
  return M;
}

double sampson_homography(const Eigen::VectorXd& h, double x, double y, double xp, double yp) {
  const double w = h(6) * x + h(7) * y + h(8);
  const double e1 = yp * w - (h(3) * x + h(4) * y + h(5));
  const double e2 = (h(0) * x + h(1) * y + h(2)) - xp * w;
  // Row gradients of (e1, e2) w.r.t. (x, y, xp, yp).
  const double g1 = std::sqrt(std::pow(yp * h(6) - h(3), 2) + std::pow(yp * h(7) - h(4), 2) + w * w);
  const double g2 = std::sqrt(std::pow(h(0) - xp * h(6), 2) + std::pow(h(1) - xp * h(7), 2) + w * w);
  const double r1 = e1 / std::max(g1, kTiny);
  const double r2 = e2 / std::max(g2, kTiny);
  return std::sqrt(r1 * r1 + r2 * r2);
}

double sampson_fundamental(const Eigen::Matrix3d& F, double x, double y, double xp, double yp) {
  const Eigen::Vector3d p(x, y, 1.0), pp(xp, yp, 1.0);
  const Eigen::Vector3d Fp = F * p;
  const Eigen::Vector3d Ftpp = F.transpose() * pp;
  const double num = std::abs(pp.dot(Fp));
  const double den = std::sqrt(Fp(0) * Fp(0) + Fp(1) * Fp(1) + Ftpp(0) * Ftpp(0) + Ftpp(1) * Ftpp(1));
  return num / std::max(den, kTiny);
}

}  // namespace

int minimal_size(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Line2D: return 2;
    case ModelKind::Circle2D: return 3;
    case ModelKind::Line3D: return 2;
    case ModelKind::Homography: return 4;
    case ModelKind::Fundamental: return 8;
  }
  return 0;
}

int ambient_dim(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Line2D: return 2;
    case ModelKind::Circle2D: return 2;
    case ModelKind::Line3D: return 3;
    case ModelKind::Homography: return 4;
    case ModelKind::Fundamental: return 4;
  }
  return 0;
}

const char* kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Line2D: return "line2d";
    case ModelKind::Circle2D: return "circle";
    case ModelKind::Line3D: return "line3d";
    case ModelKind::Homography: return "homography";
    case ModelKind::Fundamental: return "fundamental";
  }
  return "unknown";
}

ModelKind kind_from_name(const std::string& name) {
  if (name == "line2d") return ModelKind::Line2D;
  if (name == "circle" || name == "circle2d") return ModelKind::Circle2D;
  if (name == "line3d") return ModelKind::Line3D;
  if (name == "homography") return ModelKind::Homography;
  if (name == "fundamental") return ModelKind::Fundamental;
  throw Error("unknown model '" + name + "' (expected line2d, circle, line3d, homography, fundamental)");
}

bool params_valid(const ModelParams& params, double tol) {
  const auto& t = params.theta;
  if (!t.allFinite()) return false;
  switch (params.kind) {
    case ModelKind::Line2D:
      return t.size() == 3 && std::abs(t.head<2>().norm() - 1.0) <= tol;
    case ModelKind::Circle2D:
      return t.size() == 3 && t(2) > 0.0;
    case ModelKind::Line3D:
      return t.size() == 6 && std::abs(t.tail<3>().norm() - 1.0) <= tol;
    case ModelKind::Homography:
      return t.size() == 9 && std::abs(t.norm() - 1.0) <= tol;
    case ModelKind::Fundamental: {
      if (t.size() != 9 || std::abs(t.norm() - 1.0) > tol) return false;
      return std::abs(as_matrix3(t).determinant()) <= 1e-9;
    }
  }
  return false;
}

ModelParams fit_minimal(ModelKind kind, const Eigen::Ref<const Eigen::MatrixXd>& subset) {
  check_input(kind, subset, true);
  const double scale = coord_scale(subset);
  switch (kind) {
    case ModelKind::Line2D:
      return line2d_from_points(subset.row(0).transpose(), subset.row(1).transpose(), scale);
    case ModelKind::Circle2D:
      return circle_from_points(subset);
    case ModelKind::Line3D:
      return line3d_from_points(subset.row(0).transpose(), subset.row(1).transpose(), scale);
    case ModelKind::Homography:
      return homography_dlt(subset, true);
    case ModelKind::Fundamental:
      return fundamental_8pt(subset);
  }
  throw Error("unreachable model kind");
}

ModelParams fit_least_squares(ModelKind kind, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  check_input(kind, points, false);
  const Eigen::Index n = points.rows();
  const double scale = coord_scale(points);
  switch (kind) {
    case ModelKind::Line2D: {
      const Eigen::RowVector2d centroid = points.colwise().mean();
      const Eigen::MatrixXd centered = points.rowwise() - centroid;
      const Eigen::Matrix2d cov = centered.transpose() * centered;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
      const Eigen::Vector2d normal = eig.eigenvectors().col(0);  // smallest eigenvalue
      if (eig.eigenvalues()(1) <= kTiny * scale * scale)
        throw DegenerateSubset("points do not span a line");
      Eigen::Vector3d theta;
      theta << normal, -normal.dot(centroid);
      return {ModelKind::Line2D, theta};
    }
    case ModelKind::Line3D: {
      const Eigen::RowVector3d centroid = points.colwise().mean();
      const Eigen::MatrixXd centered = points.rowwise() - centroid;
      const Eigen::Matrix3d cov = centered.transpose() * centered;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
      const Eigen::Vector3d dir = eig.eigenvectors().col(2);  // largest eigenvalue
      if (eig.eigenvalues()(2) <= kTiny * scale * scale)
        throw DegenerateSubset("points do not span a line");
      Eigen::VectorXd theta(6);
      theta << centroid.transpose(), dir;
      return {ModelKind::Line3D, theta};
    }
    case ModelKind::Circle2D: {
      if (n == 3) return circle_from_points(points);
      // Kasa fit: minimize ||x|^2 - 2 c.x - t| over (c, t), r^2 = t + |c|^2.
      Eigen::MatrixXd A(n, 3);
      A.col(0) = 2.0 * points.col(0);
      A.col(1) = 2.0 * points.col(1);
      A.col(2).setOnes();
      const Eigen::VectorXd b = points.rowwise().squaredNorm();
      const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
      const double r2 = sol(2) + sol(0) * sol(0) + sol(1) * sol(1);
      if (!(r2 > 0.0) || !std::isfinite(r2)) throw DegenerateSubset("degenerate circle fit");
      return {ModelKind::Circle2D, Eigen::Vector3d(sol(0), sol(1), std::sqrt(r2))};
    }
    case ModelKind::Homography:
      return homography_dlt(points, n == 4);
    case ModelKind::Fundamental:
      return fundamental_8pt(points);
  }
  throw Error("unreachable model kind");
}

double residual(const ModelParams& params, const Eigen::Ref<const Eigen::RowVectorXd>& point) {
  if (point.size() != ambient_dim(params.kind))
    throw DimensionMismatch("residual: point dimension does not match model");
  const auto& t = params.theta;
  switch (params.kind) {
    case ModelKind::Line2D:
      return std::abs(t(0) * point(0) + t(1) * point(1) + t(2));
    case ModelKind::Circle2D:
      return std::abs((point.transpose().head<2>() - t.head<2>()).norm() - t(2));
    case ModelKind::Line3D: {
      const Eigen::Vector3d diff = point.transpose().head<3>() - t.head<3>();
      const Eigen::Vector3d dir = t.tail<3>();
      return (diff - diff.dot(dir) * dir).norm();
    }
    case ModelKind::Homography:
      return sampson_homography(t, point(0), point(1), point(2), point(3));
    case ModelKind::Fundamental:
      return sampson_fundamental(as_matrix3(t), point(0), point(1), point(2), point(3));
  }
  throw Error("unreachable model kind");
}

Eigen::VectorXd residuals(const ModelParams& params, const Eigen::Ref<const Eigen::MatrixXd>& points) {
  if (points.cols() != ambient_dim(params.kind))
    throw DimensionMismatch("residuals: point dimension does not match model");
  const Eigen::Index n = points.rows();
  const auto& t = params.theta;
  Eigen::VectorXd out(n);
  switch (params.kind) {
    case ModelKind::Line2D:
      out = ((points.col(0) * t(0) + points.col(1) * t(1)).array() + t(2)).abs().matrix();
      return out;
    case ModelKind::Circle2D: {
      const Eigen::RowVector2d c(t(0), t(1));
      out = ((points.rowwise() - c).rowwise().norm().array() - t(2)).abs().matrix();
      return out;
    }
    case ModelKind::Line3D: {
      const Eigen::RowVector3d p(t(0), t(1), t(2));
      const Eigen::Vector3d dir = t.tail<3>();
      const Eigen::MatrixXd diff = points.rowwise() - p;
      const Eigen::VectorXd along = diff * dir;
      out = (diff - along * dir.transpose()).rowwise().norm();
      return out;
    }
    case ModelKind::Homography: {
      for (Eigen::Index i = 0; i < n; ++i)
        out(i) = sampson_homography(t, points(i, 0), points(i, 1), points(i, 2), points(i, 3));
      return out;
    }
    case ModelKind::Fundamental: {
      const Eigen::Matrix3d F = as_matrix3(t);
      for (Eigen::Index i = 0; i < n; ++i)
        out(i) = sampson_fundamental(F, points(i, 0), points(i, 1), points(i, 2), points(i, 3));
      return out;
    }
  }
  throw Error("unreachable model kind");
}

}  // namespace msh
