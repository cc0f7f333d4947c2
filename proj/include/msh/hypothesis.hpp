#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "msh/geometry.hpp"
#include "msh/rng.hpp"

namespace msh {

struct SamplerConfig {
  int hypothesis_count = 5000;
  // <= 0 selects the default: 0.1 * bounding-box diagonal.
  double proximity_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  // Consecutive degenerate draws tolerated per hypothesis before giving up.
  int max_resample_attempts = 100;
};

double default_proximity_sigma(const Eigen::Ref<const Eigen::MatrixXd>& points);

// Draws m distinct row indices. The first is uniform; each further index is
// drawn without replacement with probability proportional to
// exp(-d^2 / sigma^2), d = Euclidean distance to the first point. When every
// remaining weight underflows to zero the draw falls back to uniform.
std::vector<Eigen::Index> proximity_sample(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                           int m, double sigma, Rng& rng);

// config.hypothesis_count minimal-subset models sampled by proximity.
// Degenerate subsets are redrawn; more than config.max_resample_attempts
// consecutive failures for one hypothesis throws GenerationExhausted. Output
// is deterministic in (points, config) and independent of thread count.
std::vector<ModelParams> generate_hypotheses(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                             ModelKind kind, const SamplerConfig& config,
                                             int threads = 1);

}  // namespace msh
