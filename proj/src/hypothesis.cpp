#include "msh/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "msh/parallel.hpp"

namespace msh {

double default_proximity_sigma(const Eigen::Ref<const Eigen::MatrixXd>& points) {
  if (points.rows() == 0) throw InsufficientPoints("no points");
  const Eigen::RowVectorXd lo = points.colwise().minCoeff();
  const Eigen::RowVectorXd hi = points.colwise().maxCoeff();
  const double diag = (hi - lo).norm();
  return diag > 0.0 ? 0.1 * diag : 1.0;
}

std::vector<Eigen::Index> proximity_sample(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                           int m, double sigma, Rng& rng) {
  const Eigen::Index n = points.rows();
  if (m < 1) throw Error("proximity_sample: m must be >= 1");
  if (n < m) throw InsufficientPoints("proximity_sample: fewer points than subset size");
  if (!(sigma > 0.0)) throw Error("proximity_sample: sigma must be > 0");

  std::vector<Eigen::Index> picked;
  picked.reserve(static_cast<size_t>(m));
  const Eigen::Index first = rng.uniform_int(static_cast<int>(n));
  picked.push_back(first);
  if (m == 1) return picked;

  // Kernel weights relative to the first point; chosen indices get weight 0.
  Eigen::VectorXd w =
      (-(points.rowwise() - points.row(first)).rowwise().squaredNorm() / (sigma * sigma))
          .array()
          .exp()
          .matrix();
  w(first) = 0.0;
  double total = w.sum();

  while (static_cast<int>(picked.size()) < m) {
    Eigen::Index chosen = -1;
    if (total > 0.0 && std::isfinite(total)) {
      double u = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) <= 0.0) continue;
        u -= w(i);
        chosen = i;
        if (u <= 0.0) break;
      }
    } else {
      // All remaining weights underflowed: uniform over the leftovers.
      int remaining = static_cast<int>(n - static_cast<Eigen::Index>(picked.size()));
      int skip = rng.uniform_int(remaining);
      for (Eigen::Index i = 0; i < n && chosen < 0; ++i) {
        if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
        if (skip-- == 0) chosen = i;
      }
    }
    if (chosen < 0) throw Error("proximity_sample: exhausted candidates");
    picked.push_back(chosen);
    total -= w(chosen);
    w(chosen) = 0.0;
  }
  return picked;
}

std::vector<ModelParams> generate_hypotheses(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                             ModelKind kind, const SamplerConfig& config,
                                             int threads) {
  if (points.cols() != ambient_dim(kind))
    throw DimensionMismatch("generate_hypotheses: point dimension does not match model");
  const int m = minimal_size(kind);
  if (points.rows() < m)
    throw InsufficientPoints("generate_hypotheses: fewer points than the minimal subset");
  if (config.hypothesis_count < 1)
    throw Error("generate_hypotheses: hypothesis_count must be >= 1");

  const double sigma = config.proximity_sigma > 0.0 ? config.proximity_sigma
                                                    : default_proximity_sigma(points);

  // Work is split into a fixed number of partitions, each with its own
  // derived stream, so the output does not depend on the thread count.
  const int total = config.hypothesis_count;
  const int partitions = std::min(64, total);
  const Rng base(config.rng_seed);

  std::vector<std::vector<ModelParams>> chunk(static_cast<size_t>(partitions));
  std::vector<std::vector<std::vector<Eigen::Index>>> chunk_keys(static_cast<size_t>(partitions));
  std::vector<std::string> failure(static_cast<size_t>(partitions));

  parallel_for(static_cast<size_t>(partitions), threads, [&](size_t p) {
    const int share = total / partitions + (static_cast<int>(p) < total % partitions ? 1 : 0);
    Rng rng = base.derive(static_cast<std::uint64_t>(p));
    auto& out = chunk[p];
    auto& keys = chunk_keys[p];
    out.reserve(static_cast<size_t>(share));
    keys.reserve(static_cast<size_t>(share));
    Eigen::MatrixXd subset(m, points.cols());
    for (int i = 0; i < share; ++i) {
      int failures = 0;
      for (;;) {
        auto idx = proximity_sample(points, m, sigma, rng);
        for (int r = 0; r < m; ++r) subset.row(r) = points.row(idx[static_cast<size_t>(r)]);
        try {
          out.push_back(fit_minimal(kind, subset));
          std::sort(idx.begin(), idx.end());
          keys.push_back(std::move(idx));
          break;
        } catch (const DegenerateSubset&) {
          if (++failures > config.max_resample_attempts) {
            failure[p] = "no valid minimal subset after " + std::to_string(failures) +
                         " consecutive degenerate draws";
            return;
          }
        }
      }
    }
  });

  for (const auto& msg : failure)
    if (!msg.empty()) throw GenerationExhausted("generate_hypotheses: " + msg);

  std::vector<ModelParams> all;
  all.reserve(static_cast<size_t>(total));
  std::vector<std::vector<Eigen::Index>> all_keys;
  all_keys.reserve(static_cast<size_t>(total));
  for (size_t p = 0; p < chunk.size(); ++p) {
    for (auto& h : chunk[p]) all.push_back(std::move(h));
    for (auto& k : chunk_keys[p]) all_keys.push_back(std::move(k));
  }

  // The pool is a set of minimal subsets: slots that drew an already-used
  // subset are refilled from one extra stream, sequentially so the result
  // stays schedule-independent.
  std::set<std::vector<Eigen::Index>> seen;
  Rng topup = base.derive(static_cast<std::uint64_t>(partitions));
  Eigen::MatrixXd subset(m, points.cols());
  for (size_t i = 0; i < all.size(); ++i) {
    if (seen.insert(all_keys[i]).second) continue;
    int failures = 0;
    for (;;) {
      auto idx = proximity_sample(points, m, sigma, topup);
      std::sort(idx.begin(), idx.end());
      if (!seen.count(idx)) {
        for (int r = 0; r < m; ++r) subset.row(r) = points.row(idx[static_cast<size_t>(r)]);
        try {
          all[i] = fit_minimal(kind, subset);
          seen.insert(std::move(idx));
          break;
        } catch (const DegenerateSubset&) {
        }
      }
      if (++failures > config.max_resample_attempts)
        throw GenerationExhausted("generate_hypotheses: no unused minimal subset after " +
                                  std::to_string(failures) + " consecutive rejected draws");
    }
  }
  return all;
}

}  // namespace msh
