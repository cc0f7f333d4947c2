#include "msh/modeseek.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "msh/hypothesis.hpp"
#include "msh/parallel.hpp"

namespace msh {

Eigen::VectorXd PreferenceVector::to_dense() const {
  Eigen::VectorXd dense = Eigen::VectorXd::Zero(size);
  for (const auto& [idx, value] : entries) dense(idx) = value;
  return dense;
}

PreferenceVector PreferenceVector::from_dense(const Eigen::Ref<const Eigen::VectorXd>& dense) {
  PreferenceVector p;
  p.size = dense.size();
  for (Eigen::Index i = 0; i < dense.size(); ++i) {
    if (dense(i) != 0.0) {
      p.entries.emplace_back(i, dense(i));
      p.squared_norm += dense(i) * dense(i);
    }
  }
  return p;
}

PreferenceVector preference_vector(const Hypergraph& graph, int vertex) {
  const Vertex& v = graph.vertices[static_cast<size_t>(vertex)];
  const auto& incident = graph.incident[static_cast<size_t>(vertex)];
  PreferenceVector p;
  p.size = graph.n_edges;
  p.entries.reserve(incident.size());
  for (const auto& inc : incident) {
    const double value = std::exp(-inc.residual / v.scale);
    p.entries.emplace_back(inc.edge, value);
    p.squared_norm += value * value;
  }
  return p;
}

double tanimoto(const PreferenceVector& p, const PreferenceVector& q) {
  if (p.size != q.size)
    throw DimensionMismatch("tanimoto: preference vectors over different edge sets");
  if (p.entries.empty() || q.entries.empty())
    throw ZeroVector("tanimoto: zero preference vector");
  double dot = 0.0;
  auto pi = p.entries.begin();
  auto qi = q.entries.begin();
  while (pi != p.entries.end() && qi != q.entries.end()) {
    if (pi->first < qi->first) {
      ++pi;
    } else if (qi->first < pi->first) {
      ++qi;
    } else {
      dot += pi->second * qi->second;
      ++pi;
      ++qi;
    }
  }
  const double denom = p.squared_norm + q.squared_norm - dot;
  const double t = 1.0 - dot / denom;
  return std::clamp(t, 0.0, 1.0);
}

std::vector<int> weight_aware_sample(const Hypergraph& graph, int M, Rng& rng) {
  const int n = static_cast<int>(graph.vertices.size());
  if (M < 1 || M > n) throw Error("weight_aware_sample: M out of range");

  std::vector<double> weight(static_cast<size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = graph.vertices[static_cast<size_t>(i)].weight;
    if (w < 0.0) throw Error("weight_aware_sample: negative weight");
    weight[static_cast<size_t>(i)] = w;
    total += w;
  }
  if (!(total > 0.0)) throw AllZeroWeights("weight_aware_sample: all vertex weights are zero");

  std::vector<char> taken(static_cast<size_t>(n), 0);
  std::vector<int> picked;
  picked.reserve(static_cast<size_t>(M));
  while (static_cast<int>(picked.size()) < M) {
    int chosen = -1;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        if (taken[static_cast<size_t>(i)] || weight[static_cast<size_t>(i)] <= 0.0) continue;
        u -= weight[static_cast<size_t>(i)];
        chosen = i;
        if (u <= 0.0) break;
      }
    }
    if (chosen < 0) {
      // Positive mass exhausted; remaining picks are uniform.
      int remaining = n - static_cast<int>(picked.size());
      int skip = rng.uniform_int(remaining);
      for (int i = 0; i < n && chosen < 0; ++i) {
        if (taken[static_cast<size_t>(i)]) continue;
        if (skip-- == 0) chosen = i;
      }
    }
    taken[static_cast<size_t>(chosen)] = 1;
    picked.push_back(chosen);
    total -= weight[static_cast<size_t>(chosen)];
    if (total < 0.0) total = 0.0;
    weight[static_cast<size_t>(chosen)] = 0.0;
  }
  return picked;
}

std::vector<MtdEntry> minimum_t_distances(const Hypergraph& graph,
                                          const std::vector<int>& sampled, int threads) {
  const int M = static_cast<int>(sampled.size());
  if (M < 1) throw Error("minimum_t_distances: empty sample");

  std::vector<PreferenceVector> prefs(static_cast<size_t>(M));
  parallel_for(static_cast<size_t>(M), threads,
               [&](size_t i) { prefs[i] = preference_vector(graph, sampled[i]); });

  // Positions sorted by weight descending; vertices with strictly larger
  // weight then form a prefix that a binary search can locate.
  std::vector<int> order(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double wa = graph.vertices[static_cast<size_t>(sampled[static_cast<size_t>(a)])].weight;
    const double wb = graph.vertices[static_cast<size_t>(sampled[static_cast<size_t>(b)])].weight;
    if (wa != wb) return wa > wb;
    return sampled[static_cast<size_t>(a)] < sampled[static_cast<size_t>(b)];
  });
  std::vector<double> sorted_weight(static_cast<size_t>(M));
  for (int k = 0; k < M; ++k)
    sorted_weight[static_cast<size_t>(k)] =
        graph.vertices[static_cast<size_t>(sampled[static_cast<size_t>(order[static_cast<size_t>(k)])])].weight;

  std::vector<MtdEntry> out(static_cast<size_t>(M));
  parallel_for(static_cast<size_t>(M), threads, [&](size_t k) {
    const int pos = order[k];
    const double w = sorted_weight[k];
    // Count of sampled vertices with weight strictly above w.
    const auto heavier_end = std::lower_bound(sorted_weight.begin(), sorted_weight.end(), w,
                                              [](double lhs, double value) { return lhs > value; });
    const int heavier = static_cast<int>(heavier_end - sorted_weight.begin());
    double eta = 0.0;
    if (heavier > 0) {
      eta = std::numeric_limits<double>::infinity();
      for (int j = 0; j < heavier; ++j)
        eta = std::min(eta, tanimoto(prefs[static_cast<size_t>(pos)],
                                     prefs[static_cast<size_t>(order[static_cast<size_t>(j)])]));
    } else {
      for (int j = 0; j < M; ++j) {
        if (j == static_cast<int>(k)) continue;
        eta = std::max(eta, tanimoto(prefs[static_cast<size_t>(pos)],
                                     prefs[static_cast<size_t>(order[static_cast<size_t>(j)])]));
      }
    }
    out[static_cast<size_t>(pos)] = {sampled[static_cast<size_t>(pos)], eta, w};
  });
  return out;
}

ModeSet select_modes(const std::vector<MtdEntry>& entries, int drop_window) {
  const int M = static_cast<int>(entries.size());
  if (M < 2) throw TooFewVertices("select_modes: need at least two scored vertices");
  if (drop_window < 1) throw Error("select_modes: drop_window must be >= 1");

  ModeSet result;
  result.trace = entries;
  std::sort(result.trace.begin(), result.trace.end(), [](const MtdEntry& a, const MtdEntry& b) {
    if (a.eta != b.eta) return a.eta > b.eta;
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.vertex < b.vertex;
  });

  const int gaps = std::min(M - 1, drop_window);
  int best = 0;
  double best_drop = -1.0;
  for (int i = 0; i < gaps; ++i) {
    const double drop = result.trace[static_cast<size_t>(i)].eta -
                        result.trace[static_cast<size_t>(i + 1)].eta;
    if (drop > best_drop) {
      best_drop = drop;
      best = i;
    }
  }
  // Everything with eta >= the value at the cut stays; equal values at the
  // boundary are kept together.
  const double threshold = result.trace[static_cast<size_t>(best)].eta;
  int cut = best;
  while (cut + 1 < M && result.trace[static_cast<size_t>(cut + 1)].eta >= threshold) ++cut;
  result.cut_index = cut;
  result.modes.assign(result.trace.begin(), result.trace.begin() + cut + 1);
  return result;
}

std::vector<int> label_points(const Hypergraph& graph, const std::vector<int>& mode_vertices) {
  std::vector<int> labels(static_cast<size_t>(graph.n_edges), 0);
  std::vector<double> best(static_cast<size_t>(graph.n_edges),
                           std::numeric_limits<double>::infinity());
  for (size_t m = 0; m < mode_vertices.size(); ++m) {
    const int v = mode_vertices[m];
    const double scale = graph.vertices[static_cast<size_t>(v)].scale;
    for (const auto& inc : graph.incident[static_cast<size_t>(v)]) {
      const double score = inc.residual / scale;
      // Strict comparison: on a tie the earlier mode keeps the point.
      if (score < best[static_cast<size_t>(inc.edge)]) {
        best[static_cast<size_t>(inc.edge)] = score;
        labels[static_cast<size_t>(inc.edge)] = static_cast<int>(m) + 1;
      }
    }
  }
  return labels;
}

FittingResult msh_fit(const Eigen::Ref<const Eigen::MatrixXd>& points, ModelKind kind,
                      const FitConfig& config, Hypergraph* keep_graph) {
  using clock = std::chrono::steady_clock;
  const auto ms_since = [](clock::time_point from) {
    return std::chrono::duration<double, std::milli>(clock::now() - from).count();
  };

  if (points.cols() != ambient_dim(kind))
    throw DimensionMismatch("msh_fit: point dimension does not match model");
  if (points.rows() < minimal_size(kind))
    throw InsufficientPoints("msh_fit: fewer points than the minimal subset");
  if (!(config.was_fraction > 0.0) || config.was_fraction > 1.0)
    throw Error("msh_fit: was_fraction must be in (0, 1]");

  FittingResult result;
  result.config = config;
  result.config.proximity_sigma = config.proximity_sigma > 0.0
                                      ? config.proximity_sigma
                                      : default_proximity_sigma(points);
  result.config.threads = resolve_thread_count(config.threads);

  const auto t_total = clock::now();

  SamplerConfig sampler;
  sampler.hypothesis_count = config.hypothesis_count;
  sampler.proximity_sigma = result.config.proximity_sigma;
  sampler.rng_seed = mix_seed(config.seed, 1);
  sampler.max_resample_attempts = config.max_resample_attempts;

  auto t_stage = clock::now();
  const auto hypotheses = generate_hypotheses(points, kind, sampler, config.threads);
  result.timings.generate_ms = ms_since(t_stage);

  t_stage = clock::now();
  Hypergraph graph =
      build_hypergraph(points, hypotheses, config.k_ikose, config.e_threshold, config.threads);
  result.timings.build_ms = ms_since(t_stage);

  t_stage = clock::now();
  const int n_vertices = static_cast<int>(graph.vertices.size());
  const int M = std::clamp(static_cast<int>(std::ceil(config.was_fraction * n_vertices)),
                           std::min(2, n_vertices), n_vertices);
  Rng was_rng = Rng(config.seed).derive(2);
  const auto sampled = weight_aware_sample(graph, M, was_rng);
  const auto scored = minimum_t_distances(graph, sampled, config.threads);
  result.mode_set = select_modes(scored, config.drop_window);

  std::vector<int> mode_vertices;
  mode_vertices.reserve(result.mode_set.modes.size());
  for (const auto& m : result.mode_set.modes) mode_vertices.push_back(m.vertex);
  result.labels = label_points(graph, mode_vertices);
  result.timings.seek_ms = ms_since(t_stage);

  for (size_t m = 0; m < mode_vertices.size(); ++m) {
    const Vertex& v = graph.vertices[static_cast<size_t>(mode_vertices[m])];
    ModeReport report;
    report.params = v.params;
    report.scale = v.scale;
    report.eta = result.mode_set.modes[m].eta;
    report.weight = v.weight;
    report.inlier_count =
        static_cast<int>(std::count(result.labels.begin(), result.labels.end(),
                                    static_cast<int>(m) + 1));
    if (config.refine && report.inlier_count >= minimal_size(kind)) {
      Eigen::MatrixXd inliers(report.inlier_count, points.cols());
      Eigen::Index row = 0;
      for (size_t e = 0; e < result.labels.size(); ++e)
        if (result.labels[e] == static_cast<int>(m) + 1)
          inliers.row(row++) = points.row(static_cast<Eigen::Index>(e));
      try {
        report.params = fit_least_squares(kind, inliers);
        report.refined = true;
      } catch (const Error&) {
        // Refit failed; raw minimal-subset parameters stay.
      }
    }
    result.modes.push_back(std::move(report));
  }

  result.timings.total_ms = ms_since(t_total);
  if (keep_graph != nullptr) *keep_graph = std::move(graph);
  return result;
}

}  // namespace msh
