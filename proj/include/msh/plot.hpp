#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "msh/geometry.hpp"

namespace msh {

// Scatter plot of the points colored by label (0 = gray) with the fitted
// structures overlaid where drawable (2D lines, circles, projected 3D lines;
// correspondence models plot the source frame only). Self-contained SVG.
void write_svg_scatter(const std::string& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<int>& labels,
                       const std::vector<ModelParams>& models);

}  // namespace msh
