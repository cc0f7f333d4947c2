#pragma once

#include <Eigen/Dense>
#include <vector>

#include "msh/geometry.hpp"

namespace msh {

// Epanechnikov kernel 0.75 * (1 - x^2) on [-1, 1], zero outside.
double epanechnikov(double x) noexcept;

// Plug-in bandwidth for the Epanechnikov kernel at a given noise scale:
//   b = (243 R / (35 mu^2 n))^{1/5} * scale,  R = 3/5, mu = 1/5.
// n is the number of data points the density is evaluated over.
double bandwidth(double scale, Eigen::Index n);

struct IncidentEntry {
  Eigen::Index edge;  // data point index
  double residual;    // residual of that point under the vertex's model
};

// One hypothesis that survived scale estimation.
struct Vertex {
  ModelParams params;
  double scale = 0.0;      // IKOSE estimate
  int degree = 0;          // number of incident hyperedges
  double bandwidth = 0.0;  // plug-in bandwidth at this scale
  double weight = 0.0;     // kernel-density weight over incident edges
};

// Hypotheses as weighted vertices, data points as hyperedges. A point e is
// incident to vertex v iff residual_e(v) <= e_threshold * scale(v); the
// residuals of incident pairs are cached in `incident`, sorted by edge index.
struct Hypergraph {
  std::vector<Vertex> vertices;
  Eigen::Index n_edges = 0;
  double e_threshold = 0.0;
  int k_ikose = 0;
  std::vector<std::vector<IncidentEntry>> incident;

  bool is_incident(int vertex, Eigen::Index edge) const;
};

// Average kernel density of the incident residuals:
//   w = (1 / degree) * sum_e Psi(r_e / b) / (scale * b).
// Uses vertex.scale/bandwidth/degree; `incident` must be the vertex's edges.
double vertex_weight(const Vertex& vertex, const std::vector<IncidentEntry>& incident);

// Same kernel density averaged over all n residuals instead of the incident
// ones; kept for comparison in tests of the truncated form above.
double pi_weight(double scale, double bw, const Eigen::Ref<const Eigen::VectorXd>& all_residuals);

// Scores every hypothesis with IKOSE at (K, E), drops the ones whose scale is
// degenerate or whose degree falls below the minimal subset size, and caches
// incidence. Throws EmptyHypergraph when nothing survives. Deterministic and
// independent of thread count.
Hypergraph build_hypergraph(const Eigen::Ref<const Eigen::MatrixXd>& points,
                            const std::vector<ModelParams>& hypotheses, int K, double E,
                            int threads = 1);

}  // namespace msh
