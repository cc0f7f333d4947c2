#include "msh/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "msh/errors.hpp"

namespace msh {
namespace {

const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628",
                          "#f781bf", "#17becf", "#bcbd22", "#8c564b", "#e377c2", "#636363"};
constexpr int kPaletteSize = 12;
constexpr double kCanvas = 800.0;
constexpr double kMargin = 40.0;

const char* label_color(int label) {
  if (label <= 0) return "#bbbbbb";
  return kPalette[(label - 1) % kPaletteSize];
}

struct Mapper {
  double x0, y0, sx, sy;
  double x(double v) const { return kMargin + (v - x0) * sx; }
  // SVG y grows downward; flip so the data y axis points up.
  double y(double v) const { return kCanvas - kMargin - (v - y0) * sy; }
};

}  // namespace

void write_svg_scatter(const std::string& path,
                       const Eigen::Ref<const Eigen::MatrixXd>& points,
                       const std::vector<int>& labels,
                       const std::vector<ModelParams>& models) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw Error("write_svg_scatter: no points");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n)
    throw DimensionMismatch("write_svg_scatter: label count does not match points");

  // Plot the first two coordinates (source frame for correspondences).
  const double xmin = points.col(0).minCoeff(), xmax = points.col(0).maxCoeff();
  const double ymin = points.col(1).minCoeff(), ymax = points.col(1).maxCoeff();
  const double spanx = std::max(xmax - xmin, 1e-9);
  const double spany = std::max(ymax - ymin, 1e-9);
  const double scale = (kCanvas - 2.0 * kMargin) / std::max(spanx, spany);
  const Mapper map{xmin, ymin, scale, scale};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  char buf[512];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
      << kCanvas << "\" viewBox=\"0 0 " << kCanvas << " " << kCanvas << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = labels.empty() ? 0 : labels[static_cast<size_t>(i)];
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.5\" fill=\"%s\" fill-opacity=\"0.8\"/>\n",
                  map.x(points(i, 0)), map.y(points(i, 1)), label_color(label));
    out << buf;
  }

  for (size_t m = 0; m < models.size(); ++m) {
    const char* color = kPalette[m % kPaletteSize];
    const auto& t = models[m].theta;
    switch (models[m].kind) {
      case ModelKind::Line2D:
      case ModelKind::Line3D: {
        // Clip the (projected) line to the data bounding box.
        double px, py, dx, dy;
        if (models[m].kind == ModelKind::Line2D) {
          px = -t(0) * t(2);
          py = -t(1) * t(2);
          dx = -t(1);
          dy = t(0);
        } else {
          px = t(0);
          py = t(1);
          dx = t(3);
          dy = t(4);
        }
        const double norm = std::hypot(dx, dy);
        if (norm < 1e-9) break;
        dx /= norm;
        dy /= norm;
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        bool ok = true;
        const double los[2] = {xmin - 0.02 * spanx, ymin - 0.02 * spany};
        const double his[2] = {xmax + 0.02 * spanx, ymax + 0.02 * spany};
        const double p[2] = {px, py}, d[2] = {dx, dy};
        for (int a = 0; a < 2 && ok; ++a) {
          if (std::abs(d[a]) < 1e-12) {
            if (p[a] < los[a] || p[a] > his[a]) ok = false;
            continue;
          }
          double ta = (los[a] - p[a]) / d[a], tb = (his[a] - p[a]) / d[a];
          if (ta > tb) std::swap(ta, tb);
          t0 = std::max(t0, ta);
          t1 = std::min(t1, tb);
        }
        if (!ok || !(t0 < t1)) break;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                      "stroke-width=\"1.5\"/>\n",
                      map.x(px + t0 * dx), map.y(py + t0 * dy), map.x(px + t1 * dx),
                      map.y(py + t1 * dy), color);
        out << buf;
        break;
      }
      case ModelKind::Circle2D: {
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" stroke=\"%s\" "
                      "stroke-width=\"1.5\"/>\n",
                      map.x(t(0)), map.y(t(1)), t(2) * scale, color);
        out << buf;
        break;
      }
      default:
        break;  // no 2D locus to draw for correspondence models
    }
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace msh
