#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "msh/hypergraph.hpp"
#include "msh/rng.hpp"

namespace msh {

// Sparse nonnegative vector over the hyperedges; entries sorted by index,
// squared norm cached.
struct PreferenceVector {
  Eigen::Index size = 0;
  std::vector<std::pair<Eigen::Index, double>> entries;
  double squared_norm = 0.0;

  Eigen::VectorXd to_dense() const;
  static PreferenceVector from_dense(const Eigen::Ref<const Eigen::VectorXd>& dense);
};

// Preference of vertex v over the hyperedges: exp(-r_e / scale) on incident
// edges, zero elsewhere.
PreferenceVector preference_vector(const Hypergraph& graph, int vertex);

// Tanimoto distance 1 - <p,q> / (|p|^2 + |q|^2 - <p,q>); 0 iff p == q, 1 for
// disjoint supports. Throws ZeroVector on an all-zero argument and
// DimensionMismatch when the hyperedge counts differ.
double tanimoto(const PreferenceVector& p, const PreferenceVector& q);

// M distinct vertex indices drawn without replacement, each draw proportional
// to the remaining vertex weights. Falls back to uniform over the leftovers
// once the remaining total weight is zero; throws AllZeroWeights when no
// vertex has positive weight at all.
std::vector<int> weight_aware_sample(const Hypergraph& graph, int M, Rng& rng);

struct MtdEntry {
  int vertex = 0;      // vertex index in the hypergraph
  double eta = 0.0;    // minimum Tanimoto distance to any heavier vertex
  double weight = 0.0;
};

// Minimum Tanimoto distance of every sampled vertex to the sampled vertices
// of strictly larger weight. A vertex with no heavier peer (the weight
// maximum, including ties) instead gets the maximum distance to all other
// sampled vertices, and 0 when sampled alone. Output order matches `sampled`.
std::vector<MtdEntry> minimum_t_distances(const Hypergraph& graph,
                                          const std::vector<int>& sampled, int threads = 1);

struct ModeSet {
  std::vector<MtdEntry> modes;      // prefix of the trace above the cut
  std::vector<MtdEntry> trace;      // all entries, eta descending
  int cut_index = 0;                // last kept position in `trace`
};

// Sorts by eta (descending; ties by weight then vertex index), finds the
// largest drop between adjacent entries among the top min(M-1, drop_window)
// gaps, and keeps everything above it. Throws TooFewVertices for M < 2.
ModeSet select_modes(const std::vector<MtdEntry>& entries, int drop_window = 100);

// Labels each hyperedge with 1 + the position of the mode claiming it
// (smallest residual / scale among incident modes; ties to the earlier mode),
// or 0 when no mode is incident.
std::vector<int> label_points(const Hypergraph& graph, const std::vector<int>& mode_vertices);

struct FitConfig {
  int hypothesis_count = 5000;
  double proximity_sigma = 0.0;  // <= 0: 0.1 * bounding-box diagonal
  int k_ikose = 10;
  double e_threshold = 2.5;
  double was_fraction = 0.15;    // sampled share of vertices
  int drop_window = 100;
  std::uint64_t seed = 0;
  bool refine = false;           // least-squares refit of each mode's inliers
  int max_resample_attempts = 100;
  int threads = 1;
};

struct ModeReport {
  ModelParams params;
  bool refined = false;
  double scale = 0.0;
  double eta = 0.0;
  double weight = 0.0;
  int inlier_count = 0;
};

struct StageTimings {
  double generate_ms = 0.0;
  double build_ms = 0.0;
  double seek_ms = 0.0;
  double total_ms = 0.0;
};

struct FittingResult {
  std::vector<ModeReport> modes;
  std::vector<int> labels;  // one per data point, 0 = unassigned
  ModeSet mode_set;
  FitConfig config;         // as executed (resolved sigma, thread count)
  StageTimings timings;
};

// Full pipeline: hypotheses -> hypergraph -> weight-aware sampling -> minimum
// Tanimoto distances -> largest-drop mode selection -> point labels.
// Deterministic in (points, kind, config), thread count aside from timings.
// When keep_graph is non-null the hypergraph is moved there.
FittingResult msh_fit(const Eigen::Ref<const Eigen::MatrixXd>& points, ModelKind kind,
                      const FitConfig& config, Hypergraph* keep_graph = nullptr);

}  // namespace msh
