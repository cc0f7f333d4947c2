#include "msh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace msh {
namespace {

constexpr double kMinPairAngle = 0.3;  // radians, between generated lines

std::vector<int> resolve_counts(const SyntheticSpec& spec) {
  if (spec.structure_count < 1) throw Error("synthetic spec: structure_count must be >= 1");
  if (!spec.inlier_counts.empty()) {
    if (static_cast<int>(spec.inlier_counts.size()) != spec.structure_count)
      throw Error("synthetic spec: inlier_counts size must match structure_count");
    for (int c : spec.inlier_counts)
      if (c < 1) throw Error("synthetic spec: inlier counts must be positive");
    return spec.inlier_counts;
  }
  if (spec.inliers_per_structure < 1)
    throw Error("synthetic spec: inliers_per_structure must be positive");
  return std::vector<int>(static_cast<size_t>(spec.structure_count), spec.inliers_per_structure);
}

void resolve_box(const SyntheticSpec& spec, int dim, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  if (spec.box_min.size() == dim && spec.box_max.size() == dim) {
    lo = spec.box_min;
    hi = spec.box_max;
  } else {
    lo = Eigen::VectorXd::Zero(dim);
    hi = Eigen::VectorXd::Constant(dim, 100.0);
  }
  for (int a = 0; a < dim; ++a)
    if (!(hi(a) > lo(a))) throw Error("synthetic spec: box must have positive extent");
}

Eigen::VectorXd uniform_in_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, Rng& rng) {
  Eigen::VectorXd p(lo.size());
  for (Eigen::Index a = 0; a < lo.size(); ++a) p(a) = rng.uniform(lo(a), hi(a));
  return p;
}

Eigen::VectorXd random_unit(int dim, Rng& rng) {
  for (;;) {
    Eigen::VectorXd d(dim);
    for (int a = 0; a < dim; ++a) d(a) = rng.normal();
    const double norm = d.norm();
    if (norm > 1e-9) return d / norm;
  }
}

// Angle between undirected lines.
double line_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::min(1.0, std::abs(a.dot(b))));
}

// Parameter range of {p + t d} inside the box; requires p inside.
std::pair<double, double> clip_to_box(const Eigen::VectorXd& p, const Eigen::VectorXd& d,
                                      const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    if (std::abs(d(a)) < 1e-12) continue;
    double ta = (lo(a) - p(a)) / d(a);
    double tb = (hi(a) - p(a)) / d(a);
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (!(t0 < t1)) throw Error("synthetic line does not cross the box");
  return {t0, t1};
}

ModelParams line_params(const Eigen::VectorXd& p, const Eigen::VectorXd& d) {
  if (p.size() == 2) {
    const double a = -d(1), b = d(0);
    Eigen::Vector3d theta(a, b, -(a * p(0) + b * p(1)));
    return {ModelKind::Line2D, theta};
  }
  Eigen::VectorXd theta(6);
  theta << p, d;
  return {ModelKind::Line3D, theta};
}

}  // namespace

LabeledDataset gen_lines(const SyntheticSpec& spec, int dim, Rng& rng,
                         std::vector<ModelParams>* true_models) {
  if (dim != 2 && dim != 3) throw Error("gen_lines: dim must be 2 or 3");
  const auto counts = resolve_counts(spec);
  Eigen::VectorXd lo, hi;
  resolve_box(spec, dim, lo, hi);
  const int k = spec.structure_count;

  // Anchor + unit direction per line, all anchors inside the box.
  std::vector<Eigen::VectorXd> anchor(static_cast<size_t>(k)), dir(static_cast<size_t>(k));
  for (int s = 0; s < k; ++s) {
    for (int attempt = 0;; ++attempt) {
      Eigen::VectorXd p, d;
      switch (spec.layout) {
        case Layout::Star:
          p = 0.5 * (lo + hi);
          d = random_unit(dim, rng);
          break;
        case Layout::Random:
          p = uniform_in_box(lo, hi, rng);
          d = random_unit(dim, rng);
          break;
        case Layout::Intersecting: {
          if (s == 0) {
            p = uniform_in_box(lo, hi, rng);
            d = random_unit(dim, rng);
          } else {
            const int j = rng.uniform_int(s);
            const auto [t0, t1] = clip_to_box(anchor[static_cast<size_t>(j)],
                                              dir[static_cast<size_t>(j)], lo, hi);
            p = anchor[static_cast<size_t>(j)] +
                rng.uniform(t0, t1) * dir[static_cast<size_t>(j)];
            d = random_unit(dim, rng);
          }
          break;
        }
      }
      bool separated = true;
      for (int j = 0; j < s && separated; ++j)
        if (line_angle(d, dir[static_cast<size_t>(j)]) < kMinPairAngle) separated = false;
      if (separated || attempt > 500) {
        anchor[static_cast<size_t>(s)] = p;
        dir[static_cast<size_t>(s)] = d;
        break;
      }
    }
  }

  const int total = std::accumulate(counts.begin(), counts.end(), 0) + spec.outlier_count;
  LabeledDataset ds;
  ds.points.resize(total, dim);
  ds.gt_labels.resize(static_cast<size_t>(total));
  Eigen::Index row = 0;
  for (int s = 0; s < k; ++s) {
    const auto [t0, t1] = clip_to_box(anchor[static_cast<size_t>(s)], dir[static_cast<size_t>(s)], lo, hi);
    for (int i = 0; i < counts[static_cast<size_t>(s)]; ++i) {
      Eigen::VectorXd x = anchor[static_cast<size_t>(s)] +
                          rng.uniform(t0, t1) * dir[static_cast<size_t>(s)];
      for (int a = 0; a < dim; ++a) x(a) += spec.inlier_sigma * rng.normal();
      ds.points.row(row) = x.transpose();
      ds.gt_labels[static_cast<size_t>(row)] = s + 1;
      ++row;
    }
  }
  for (int i = 0; i < spec.outlier_count; ++i) {
    ds.points.row(row) = uniform_in_box(lo, hi, rng).transpose();
    ds.gt_labels[static_cast<size_t>(row)] = 0;
    ++row;
  }
  if (true_models != nullptr) {
    true_models->clear();
    for (int s = 0; s < k; ++s)
      true_models->push_back(line_params(anchor[static_cast<size_t>(s)], dir[static_cast<size_t>(s)]));
  }
  ds.provenance = "synthetic:lines" + std::to_string(dim) + "d(k=" + std::to_string(k) + ")";
  return ds;
}

LabeledDataset gen_circles(const SyntheticSpec& spec, Rng& rng,
                           std::vector<ModelParams>* true_models) {
  const auto counts = resolve_counts(spec);
  Eigen::VectorXd lo, hi;
  resolve_box(spec, 2, lo, hi);
  const int k = spec.structure_count;
  const double extent = std::min(hi(0) - lo(0), hi(1) - lo(1));

  std::vector<Eigen::Vector2d> center(static_cast<size_t>(k));
  std::vector<double> radius(static_cast<size_t>(k));
  for (int s = 0; s < k; ++s) {
    for (int attempt = 0;; ++attempt) {
      const double r = rng.uniform(0.15, 0.35) * extent;
      Eigen::Vector2d c(rng.uniform(lo(0) + r, hi(0) - r), rng.uniform(lo(1) + r, hi(1) - r));
      bool separated = true;
      for (int j = 0; j < s && separated; ++j) {
        // Avoid nearly identical circles; crossing ones are fine.
        const double dc = (c - center[static_cast<size_t>(j)]).norm();
        if (dc + std::abs(r - radius[static_cast<size_t>(j)]) < 0.2 * extent) separated = false;
      }
      if (separated || attempt > 500) {
        center[static_cast<size_t>(s)] = c;
        radius[static_cast<size_t>(s)] = r;
        break;
      }
    }
  }

  const int total = std::accumulate(counts.begin(), counts.end(), 0) + spec.outlier_count;
  LabeledDataset ds;
  ds.points.resize(total, 2);
  ds.gt_labels.resize(static_cast<size_t>(total));
  Eigen::Index row = 0;
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int s = 0; s < k; ++s) {
    for (int i = 0; i < counts[static_cast<size_t>(s)]; ++i) {
      const double angle = rng.uniform(0.0, kTwoPi);
      Eigen::Vector2d x = center[static_cast<size_t>(s)] +
                          radius[static_cast<size_t>(s)] * Eigen::Vector2d(std::cos(angle), std::sin(angle));
      x.x() += spec.inlier_sigma * rng.normal();
      x.y() += spec.inlier_sigma * rng.normal();
      ds.points.row(row) = x.transpose();
      ds.gt_labels[static_cast<size_t>(row)] = s + 1;
      ++row;
    }
  }
  for (int i = 0; i < spec.outlier_count; ++i) {
    ds.points.row(row) = uniform_in_box(lo, hi, rng).transpose();
    ds.gt_labels[static_cast<size_t>(row)] = 0;
    ++row;
  }
  if (true_models != nullptr) {
    true_models->clear();
    for (int s = 0; s < k; ++s)
      true_models->push_back({ModelKind::Circle2D,
                              Eigen::Vector3d(center[static_cast<size_t>(s)].x(),
                                              center[static_cast<size_t>(s)].y(),
                                              radius[static_cast<size_t>(s)])});
  }
  ds.provenance = "synthetic:circles(k=" + std::to_string(k) + ")";
  return ds;
}

namespace {

Eigen::Vector2d project_h(const Eigen::VectorXd& h, const Eigen::Vector2d& x) {
  const double w = h(6) * x.x() + h(7) * x.y() + h(8);
  if (std::abs(w) < 1e-9) throw Error("projection through infinity");
  return {(h(0) * x.x() + h(1) * x.y() + h(2)) / w,
          (h(3) * x.x() + h(4) * x.y() + h(5)) / w};
}

}  // namespace

LabeledDataset gen_homographies(const SyntheticSpec& spec, Rng& rng,
                                std::vector<ModelParams>* true_models) {
  const auto counts = resolve_counts(spec);
  Eigen::VectorXd lo, hi;
  if (spec.box_min.size() == 2 && spec.box_max.size() == 2) {
    lo = spec.box_min;
    hi = spec.box_max;
  } else {
    lo = Eigen::Vector2d(0.0, 0.0);
    hi = Eigen::Vector2d(640.0, 480.0);
  }
  const double W = hi(0) - lo(0), H = hi(1) - lo(1);
  if (!(W > 0.0) || !(H > 0.0)) throw Error("synthetic spec: box must have positive extent");
  const int k = spec.structure_count;
  const double band = W / k;

  // One homography per vertical band of the source frame, built from its
  // perturbed corners.
  std::vector<ModelParams> models(static_cast<size_t>(k));
  for (int s = 0; s < k; ++s) {
    const double x0 = lo(0) + s * band, x1 = x0 + band;
    for (int attempt = 0;; ++attempt) {
      Eigen::MatrixXd corr(4, 4);
      const double corners[4][2] = {{x0, lo(1)}, {x1, lo(1)}, {x1, hi(1)}, {x0, hi(1)}};
      const double wobble = 0.12 * std::min(W, H);
      for (int c = 0; c < 4; ++c) {
        corr(c, 0) = corners[c][0];
        corr(c, 1) = corners[c][1];
        corr(c, 2) = corners[c][0] + rng.uniform(-wobble, wobble);
        corr(c, 3) = corners[c][1] + rng.uniform(-wobble, wobble);
      }
      try {
        models[static_cast<size_t>(s)] = fit_minimal(ModelKind::Homography, corr);
        break;
      } catch (const DegenerateSubset&) {
        if (attempt > 100) throw Error("gen_homographies: could not build a band homography");
      }
    }
  }

  const int total = std::accumulate(counts.begin(), counts.end(), 0) + spec.outlier_count;
  LabeledDataset ds;
  ds.points.resize(total, 4);
  ds.gt_labels.resize(static_cast<size_t>(total));
  Eigen::Index row = 0;
  const double margin = 0.05 * band;
  for (int s = 0; s < k; ++s) {
    const double x0 = lo(0) + s * band, x1 = x0 + band;
    for (int i = 0; i < counts[static_cast<size_t>(s)]; ++i) {
      for (int attempt = 0;; ++attempt) {
        const Eigen::Vector2d src(rng.uniform(x0 + margin, x1 - margin),
                                  rng.uniform(lo(1) + margin, hi(1) - margin));
        try {
          Eigen::Vector2d dst = project_h(models[static_cast<size_t>(s)].theta, src);
          dst.x() += spec.inlier_sigma * rng.normal();
          dst.y() += spec.inlier_sigma * rng.normal();
          if (attempt <= 100 &&
              (dst.x() < lo(0) - 0.25 * W || dst.x() > hi(0) + 0.25 * W ||
               dst.y() < lo(1) - 0.25 * H || dst.y() > hi(1) + 0.25 * H))
            continue;  // far outside the frame; resample the source point
          ds.points.row(row) << src.x(), src.y(), dst.x(), dst.y();
          break;
        } catch (const Error&) {
          if (attempt > 100) throw;
        }
      }
      ds.gt_labels[static_cast<size_t>(row)] = s + 1;
      ++row;
    }
  }
  for (int i = 0; i < spec.outlier_count; ++i) {
    ds.points.row(row) << rng.uniform(lo(0), hi(0)), rng.uniform(lo(1), hi(1)),
        rng.uniform(lo(0), hi(0)), rng.uniform(lo(1), hi(1));
    ds.gt_labels[static_cast<size_t>(row)] = 0;
    ++row;
  }
  if (true_models != nullptr) *true_models = models;
  ds.provenance = "synthetic:homographies(k=" + std::to_string(k) + ")";
  return ds;
}

namespace {

// Hungarian algorithm with potentials on a square cost matrix; O(n^3).
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<size_t>(n + 1), 0.0), v(static_cast<size_t>(n + 1), 0.0);
  std::vector<int> match(static_cast<size_t>(n + 1), 0), way(static_cast<size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n + 1), kInf);
    std::vector<char> used(static_cast<size_t>(n + 1), 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = match[static_cast<size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                           u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] >= 1)
      row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace

std::vector<int> max_score_assignment(const Eigen::Ref<const Eigen::MatrixXd>& score) {
  const int rows = static_cast<int>(score.rows());
  const int cols = static_cast<int>(score.cols());
  if (rows == 0) return {};
  if (cols == 0) return std::vector<int>(static_cast<size_t>(rows), -1);
  const int n = std::max(rows, cols);
  const double top = score.maxCoeff();
  // Padding cells carry the cost of score 0, so unmatched rows/columns are
  // exactly "explain nothing".
  std::vector<std::vector<double>> cost(static_cast<size_t>(n),
                                        std::vector<double>(static_cast<size_t>(n), top));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      cost[static_cast<size_t>(i)][static_cast<size_t>(j)] = top - score(i, j);
  auto assignment = min_cost_assignment(cost);
  std::vector<int> out(static_cast<size_t>(rows), -1);
  for (int i = 0; i < rows; ++i) {
    const int j = assignment[static_cast<size_t>(i)];
    out[static_cast<size_t>(i)] = (j >= 0 && j < cols) ? j : -1;
  }
  return out;
}

double misclassification_error(const std::vector<int>& predicted,
                               const std::vector<int>& reference) {
  if (predicted.size() != reference.size())
    throw DimensionMismatch("misclassification_error: label vectors differ in length");
  const auto n = predicted.size();
  if (n == 0) return 0.0;
  int pmax = 0, rmax = 0;
  for (size_t i = 0; i < n; ++i) {
    if (predicted[i] < 0 || reference[i] < 0)
      throw Error("misclassification_error: labels must be nonnegative");
    pmax = std::max(pmax, predicted[i]);
    rmax = std::max(rmax, reference[i]);
  }
  size_t explained = 0;
  for (size_t i = 0; i < n; ++i)
    if (predicted[i] == 0 && reference[i] == 0) ++explained;
  if (pmax > 0 && rmax > 0) {
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(pmax, rmax);
    for (size_t i = 0; i < n; ++i)
      if (predicted[i] > 0 && reference[i] > 0) counts(predicted[i] - 1, reference[i] - 1) += 1.0;
    const auto assignment = max_score_assignment(counts);
    for (int i = 0; i < pmax; ++i)
      if (assignment[static_cast<size_t>(i)] >= 0)
        explained += static_cast<size_t>(counts(i, assignment[static_cast<size_t>(i)]));
  }
  return 100.0 * static_cast<double>(n - explained) / static_cast<double>(n);
}

ExperimentSummary run_experiment(const std::string& name,
                                 const std::function<LabeledDataset(std::uint64_t)>& dataset_for_seed,
                                 ModelKind kind, const FitConfig& config, int repeats,
                                 std::uint64_t master_seed) {
  if (repeats < 1) throw Error("run_experiment: repeats must be >= 1");
  ExperimentSummary summary;
  summary.name = name;
  summary.repeats = repeats;
  for (int i = 0; i < repeats; ++i) {
    const std::uint64_t repeat_seed = mix_seed(master_seed, static_cast<std::uint64_t>(i));
    try {
      const LabeledDataset ds = dataset_for_seed(repeat_seed);
      if (!ds.has_labels())
        throw Error("run_experiment: dataset provides no ground-truth labels");
      FitConfig c = config;
      c.seed = mix_seed(repeat_seed, 1);
      const auto t0 = std::chrono::steady_clock::now();
      const FittingResult result = msh_fit(ds.points, kind, c);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      summary.errors.push_back(misclassification_error(result.labels, ds.gt_labels));
      summary.mode_counts.push_back(static_cast<int>(result.modes.size()));
      summary.runtimes_ms.push_back(ms);
      summary.mode_count_histogram[static_cast<int>(result.modes.size())] += 1;
    } catch (const Error& e) {
      summary.failures.emplace_back(e.what());
    }
  }
  if (!summary.errors.empty()) {
    const auto count = static_cast<double>(summary.errors.size());
    summary.avg_error =
        std::accumulate(summary.errors.begin(), summary.errors.end(), 0.0) / count;
    summary.min_error = *std::min_element(summary.errors.begin(), summary.errors.end());
    double var = 0.0;
    for (double e : summary.errors) var += (e - summary.avg_error) * (e - summary.avg_error);
    summary.std_error = std::sqrt(var / count);
    summary.mean_runtime_ms =
        std::accumulate(summary.runtimes_ms.begin(), summary.runtimes_ms.end(), 0.0) / count;
  }
  return summary;
}

}  // namespace msh
