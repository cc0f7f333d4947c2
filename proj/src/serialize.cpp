#include "msh/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace msh {

nlohmann::json result_to_json(const FittingResult& result, ModelKind kind,
                              bool include_timings) {
  nlohmann::json j;
  j["model"] = kind_name(kind);
  j["config"] = {
      {"hypotheses", result.config.hypothesis_count},
      {"proximity_sigma", result.config.proximity_sigma},
      {"k_ikose", result.config.k_ikose},
      {"e_threshold", result.config.e_threshold},
      {"was_fraction", result.config.was_fraction},
      {"drop_window", result.config.drop_window},
      {"seed", result.config.seed},
      {"refine", result.config.refine},
  };
  j["modes"] = nlohmann::json::array();
  for (size_t m = 0; m < result.modes.size(); ++m) {
    const ModeReport& mode = result.modes[m];
    nlohmann::json jm;
    jm["index"] = m + 1;
    jm["theta"] = std::vector<double>(mode.params.theta.data(),
                                      mode.params.theta.data() + mode.params.theta.size());
    jm["scale"] = mode.scale;
    jm["eta"] = mode.eta;
    jm["weight"] = mode.weight;
    jm["inlier_count"] = mode.inlier_count;
    jm["refined"] = mode.refined;
    j["modes"].push_back(jm);
  }
  j["labels"] = result.labels;
  j["mtd"] = mtd_trace_to_json(result.mode_set);
  if (include_timings) {
    j["timings_ms"] = {
        {"generate", result.timings.generate_ms},
        {"build", result.timings.build_ms},
        {"seek", result.timings.seek_ms},
        {"total", result.timings.total_ms},
    };
  }
  return j;
}

nlohmann::json mtd_trace_to_json(const ModeSet& mode_set) {
  nlohmann::json j;
  std::vector<double> eta, weight;
  std::vector<int> vertex;
  eta.reserve(mode_set.trace.size());
  for (const auto& e : mode_set.trace) {
    eta.push_back(e.eta);
    weight.push_back(e.weight);
    vertex.push_back(e.vertex);
  }
  j["eta"] = eta;
  j["weight"] = weight;
  j["vertex"] = vertex;
  j["cut_index"] = mode_set.cut_index;
  j["mode_count"] = mode_set.modes.size();
  return j;
}

nlohmann::json hypergraph_to_json(const Hypergraph& graph) {
  nlohmann::json j;
  j["n_edges"] = graph.n_edges;
  j["e_threshold"] = graph.e_threshold;
  j["k_ikose"] = graph.k_ikose;
  j["vertices"] = nlohmann::json::array();
  for (size_t v = 0; v < graph.vertices.size(); ++v) {
    const Vertex& vert = graph.vertices[v];
    nlohmann::json jv;
    jv["theta"] = std::vector<double>(vert.params.theta.data(),
                                      vert.params.theta.data() + vert.params.theta.size());
    jv["scale"] = vert.scale;
    jv["degree"] = vert.degree;
    jv["bandwidth"] = vert.bandwidth;
    jv["weight"] = vert.weight;
    std::vector<Eigen::Index> edges;
    edges.reserve(graph.incident[v].size());
    for (const auto& inc : graph.incident[v]) edges.push_back(inc.edge);
    jv["edges"] = edges;
    j["vertices"].push_back(jv);
  }
  return j;
}

nlohmann::json summary_to_json(const ExperimentSummary& summary) {
  nlohmann::json j;
  j["name"] = summary.name;
  j["repeats"] = summary.repeats;
  j["errors"] = summary.errors;
  j["mode_counts"] = summary.mode_counts;
  j["runtimes_ms"] = summary.runtimes_ms;
  j["failures"] = summary.failures;
  j["std"] = summary.std_error;
  j["avg"] = summary.avg_error;
  j["min"] = summary.min_error;
  j["mean_runtime_ms"] = summary.mean_runtime_ms;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [count, times] : summary.mode_count_histogram)
    hist[std::to_string(count)] = times;
  j["mode_count_histogram"] = hist;
  return j;
}

std::string summaries_to_csv(const std::vector<ExperimentSummary>& summaries,
                             const std::vector<int>& structure_counts) {
  if (summaries.size() != structure_counts.size())
    throw Error("summaries_to_csv: size mismatch");
  std::string csv = "name,structures,std,avg,min,correct_count_rate,mean_runtime_ms,failed\n";
  char buf[256];
  for (size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    int correct = 0;
    for (int c : s.mode_counts)
      if (c == structure_counts[i]) ++correct;
    const int succeeded = static_cast<int>(s.errors.size());
    const double rate = succeeded > 0 ? static_cast<double>(correct) / succeeded : 0.0;
    std::snprintf(buf, sizeof(buf), "%s,%d,%.4f,%.4f,%.4f,%.4f,%.1f,%d\n", s.name.c_str(),
                  structure_counts[i], s.std_error, s.avg_error, s.min_error, rate,
                  s.mean_runtime_ms, static_cast<int>(s.failures.size()));
    csv += buf;
  }
  return csv;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace msh
