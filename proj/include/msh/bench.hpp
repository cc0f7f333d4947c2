#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "msh/geometry.hpp"
#include "msh/modeseek.hpp"
#include "msh/rng.hpp"

namespace msh {

enum class Layout {
  Star,          // all structures through a common point
  Random,        // independent random placement
  Intersecting,  // each new structure crosses a previous one
};

struct SyntheticSpec {
  int structure_count = 3;
  int inliers_per_structure = 100;
  std::vector<int> inlier_counts;  // optional per-structure override
  int outlier_count = 400;
  double inlier_sigma = 1.0;       // per-coordinate Gaussian noise
  Eigen::VectorXd box_min, box_max;  // empty: generator default
  Layout layout = Layout::Random;
};

struct LabeledDataset {
  Eigen::MatrixXd points;
  std::vector<int> gt_labels;  // empty when no ground truth; 0 = outlier
  std::string provenance;

  bool has_labels() const { return !gt_labels.empty(); }
};

// dim = 2 or 3. Inliers are uniform along each line's intersection with the
// box plus Gaussian noise; outliers are uniform in the box. Labels are
// 1-based per structure, 0 for outliers. true_models receives the noise-free
// structures when non-null.
LabeledDataset gen_lines(const SyntheticSpec& spec, int dim, Rng& rng,
                         std::vector<ModelParams>* true_models = nullptr);

// Circles placed inside the box with radii scaled to its extent.
LabeledDataset gen_circles(const SyntheticSpec& spec, Rng& rng,
                           std::vector<ModelParams>* true_models = nullptr);

// Planar-region correspondences: each structure occupies a vertical band of
// the source frame and maps through its own homography (a perturbed band
// warp); rows are (x1, y1, x2, y2). Outliers pair independent uniform points.
LabeledDataset gen_homographies(const SyntheticSpec& spec, Rng& rng,
                                std::vector<ModelParams>* true_models = nullptr);

// Optimal assignment between predicted and reference structures (Hungarian
// algorithm on the shared-point counts), then the percentage of points not
// explained by that assignment. Outlier label 0 only matches 0.
double misclassification_error(const std::vector<int>& predicted,
                               const std::vector<int>& reference);

// Column index assigned to each row under the maximum-total-score assignment
// (-1 when the row ends up unmatched). Exposed for testing.
std::vector<int> max_score_assignment(const Eigen::Ref<const Eigen::MatrixXd>& score);

struct ExperimentSummary {
  std::string name;
  int repeats = 0;
  std::vector<double> errors;        // per successful repeat, percent
  std::vector<int> mode_counts;
  std::vector<double> runtimes_ms;
  std::vector<std::string> failures; // error text of failed repeats
  double std_error = 0.0;            // population standard deviation
  double avg_error = 0.0;
  double min_error = 0.0;
  double mean_runtime_ms = 0.0;
  std::map<int, int> mode_count_histogram;
};

// Runs `repeats` seeded fits: repeat i gets dataset dataset_for_seed(s_i) and
// fit seed derived from s_i, where s_i = mix_seed(master_seed, i). Per-repeat
// errors need ground-truth labels. Exceptions from one repeat are recorded,
// not propagated.
ExperimentSummary run_experiment(const std::string& name,
                                 const std::function<LabeledDataset(std::uint64_t)>& dataset_for_seed,
                                 ModelKind kind, const FitConfig& config, int repeats,
                                 std::uint64_t master_seed);

}  // namespace msh
