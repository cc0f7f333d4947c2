#include "msh/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "msh/parallel.hpp"
#include "msh/scale.hpp"

namespace msh {

double epanechnikov(double x) noexcept {
  const double x2 = x * x;
  return x2 >= 1.0 ? 0.0 : 0.75 * (1.0 - x2);
}

double bandwidth(double scale, Eigen::Index n) {
  if (n < 1) throw Error("bandwidth: n must be >= 1");
  if (!(scale > 0.0)) throw Error("bandwidth: scale must be > 0");
  // R = integral of Psi^2 and mu = second moment of the Epanechnikov kernel.
  constexpr double kR = 3.0 / 5.0;
  constexpr double kMu = 1.0 / 5.0;
  constexpr double kKernelConstant = 243.0 * kR / (35.0 * kMu * kMu);
  return std::pow(kKernelConstant / static_cast<double>(n), 0.2) * scale;
}

bool Hypergraph::is_incident(int vertex, Eigen::Index edge) const {
  const auto& list = incident[static_cast<size_t>(vertex)];
  const auto it = std::lower_bound(list.begin(), list.end(), edge,
                                   [](const IncidentEntry& e, Eigen::Index v) { return e.edge < v; });
  return it != list.end() && it->edge == edge;
}

double vertex_weight(const Vertex& vertex, const std::vector<IncidentEntry>& incident) {
  if (vertex.degree <= 0) throw Error("vertex_weight: degree must be positive");
  if (!(vertex.scale > 0.0) || !(vertex.bandwidth > 0.0))
    throw Error("vertex_weight: scale and bandwidth must be positive");
  double sum = 0.0;
  for (const auto& inc : incident) sum += epanechnikov(inc.residual / vertex.bandwidth);
  return sum / (vertex.degree * vertex.scale * vertex.bandwidth);
}

double pi_weight(double scale, double bw, const Eigen::Ref<const Eigen::VectorXd>& all_residuals) {
  const Eigen::Index n = all_residuals.size();
  if (n < 1) throw Error("pi_weight: no residuals");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += epanechnikov(all_residuals(i) / bw);
  return sum / (static_cast<double>(n) * scale * bw);
}

Hypergraph build_hypergraph(const Eigen::Ref<const Eigen::MatrixXd>& points,
                            const std::vector<ModelParams>& hypotheses, int K, double E,
                            int threads) {
  if (hypotheses.empty()) throw EmptyHypergraph("build_hypergraph: no hypotheses");
  const Eigen::Index n = points.rows();

  struct Slot {
    bool kept = false;
    Vertex vertex;
    std::vector<IncidentEntry> edges;
  };
  std::vector<Slot> slots(hypotheses.size());

  parallel_for(hypotheses.size(), threads, [&](size_t i) {
    const ModelParams& params = hypotheses[i];
    const Eigen::VectorXd r = residuals(params, points);
    ScaleEstimate est;
    try {
      est = ikose(r, K, E);
    } catch (const DegenerateScale&) {
      return;  // vertex dropped
    }
    const double cutoff = E * est.scale;
    std::vector<IncidentEntry> edges;
    for (Eigen::Index e = 0; e < n; ++e)
      if (r(e) <= cutoff) edges.push_back({e, r(e)});
    if (static_cast<int>(edges.size()) < minimal_size(params.kind)) return;

    Slot& slot = slots[i];
    slot.vertex.params = params;
    slot.vertex.scale = est.scale;
    slot.vertex.degree = static_cast<int>(edges.size());
    slot.vertex.bandwidth = bandwidth(est.scale, n);
    slot.vertex.weight = vertex_weight(slot.vertex, edges);
    slot.edges = std::move(edges);
    slot.kept = true;
  });

  Hypergraph g;
  g.n_edges = n;
  g.e_threshold = E;
  g.k_ikose = K;
  for (auto& slot : slots) {
    if (!slot.kept) continue;
    g.vertices.push_back(std::move(slot.vertex));
    g.incident.push_back(std::move(slot.edges));
  }
  if (g.vertices.empty())
    throw EmptyHypergraph("build_hypergraph: every hypothesis was dropped");
  return g;
}

}  // namespace msh
