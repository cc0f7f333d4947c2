#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "msh/bench.hpp"
#include "msh/hypergraph.hpp"
#include "msh/modeseek.hpp"

namespace msh {

// include_timings=false yields the canonical form: byte-identical across
// reruns with the same seed (wall-clock fields are the only nondeterminism).
nlohmann::json result_to_json(const FittingResult& result, ModelKind kind,
                              bool include_timings = true);

nlohmann::json mtd_trace_to_json(const ModeSet& mode_set);

nlohmann::json hypergraph_to_json(const Hypergraph& graph);

nlohmann::json summary_to_json(const ExperimentSummary& summary);

// One CSV row per summary: name,structures,std,avg,min,correct_rate,...
std::string summaries_to_csv(const std::vector<ExperimentSummary>& summaries,
                             const std::vector<int>& structure_counts);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace msh
