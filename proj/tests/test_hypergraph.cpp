#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "msh/hypergraph.hpp"
#include "msh/hypothesis.hpp"
#include "msh/rng.hpp"
#include "msh/scale.hpp"

namespace {

// Two horizontal bands of noisy line points plus uniform clutter.
Eigen::MatrixXd two_lines(msh::Rng& rng, int per_line = 80, int clutter = 60) {
  Eigen::MatrixXd pts(2 * per_line + clutter, 2);
  int r = 0;
  for (int i = 0; i < per_line; ++i, ++r)
    pts.row(r) << rng.uniform(0, 100), 20.0 + rng.normal(0, 0.5);
  for (int i = 0; i < per_line; ++i, ++r)
    pts.row(r) << rng.uniform(0, 100), 70.0 + rng.normal(0, 0.5);
  for (int i = 0; i < clutter; ++i, ++r)
    pts.row(r) << rng.uniform(0, 100), rng.uniform(0, 100);
  return pts;
}

}  // namespace

TEST_CASE("kernel is the parabola on [-1,1] and zero outside") {
  CHECK(msh::epanechnikov(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(msh::epanechnikov(0.5) == doctest::Approx(0.75 * 0.75).epsilon(1e-15));
  CHECK(msh::epanechnikov(1.0) == 0.0);
  CHECK(msh::epanechnikov(-1.0) == 0.0);
  CHECK(msh::epanechnikov(1.5) == 0.0);
  CHECK(msh::epanechnikov(-2.0) == 0.0);
  CHECK(msh::epanechnikov(-0.5) == msh::epanechnikov(0.5));
}

TEST_CASE("plug-in bandwidth closed form") {
  // (243 * (3/5) / (35 * (1/5)^2 * n))^{1/5} * scale, evaluated directly.
  CHECK(msh::bandwidth(1.0, 1) == doctest::Approx(2.53236263953233).epsilon(1e-12));
  CHECK(msh::bandwidth(2.5, 1) == doctest::Approx(2.5 * 2.53236263953233).epsilon(1e-12));
  CHECK(msh::bandwidth(1.0, 32) ==
        doctest::Approx(2.53236263953233 / 2.0).epsilon(1e-12));  // n^{-1/5}
  CHECK_THROWS_AS(msh::bandwidth(0.0, 10), msh::Error);
  CHECK_THROWS_AS(msh::bandwidth(1.0, 0), msh::Error);
}

TEST_CASE("incidence holds exactly at residual <= E * scale") {
  msh::Rng rng(71);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 400;
  sc.rng_seed = 72;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto g = msh::build_hypergraph(pts, pool, 10, 2.5);
  REQUIRE(!g.vertices.empty());
  CHECK(g.n_edges == pts.rows());
  CHECK(g.e_threshold == 2.5);
  CHECK(g.k_ikose == 10);
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& vx = g.vertices[v];
    CHECK(vx.scale > 0.0);
    CHECK(vx.degree == static_cast<int>(g.incident[v].size()));
    CHECK(vx.degree >= 2);  // at least the minimal subset size
    const Eigen::VectorXd r = msh::residuals(vx.params, pts);
    int expected_degree = 0;
    for (Eigen::Index e = 0; e < r.size(); ++e) {
      const bool in = r(e) <= 2.5 * vx.scale;
      if (in) ++expected_degree;
      CHECK(g.is_incident(static_cast<int>(v), e) == in);
    }
    CHECK(vx.degree == expected_degree);
  }
}

TEST_CASE("cached incident residuals match fresh evaluation and stay sorted") {
  msh::Rng rng(73);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 200;
  sc.rng_seed = 74;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto g = msh::build_hypergraph(pts, pool, 10, 2.5);
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    Eigen::Index prev = -1;
    for (const auto& entry : g.incident[v]) {
      CHECK(entry.edge > prev);
      prev = entry.edge;
      const double fresh = msh::residual(g.vertices[v].params, pts.row(entry.edge));
      CHECK(entry.residual == doctest::Approx(fresh).epsilon(1e-12));
    }
  }
}

TEST_CASE("vertex weight is the average incident kernel density") {
  msh::Rng rng(75);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 300;
  sc.rng_seed = 76;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto g = msh::build_hypergraph(pts, pool, 10, 2.5);
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& vx = g.vertices[v];
    CHECK(vx.bandwidth == doctest::Approx(msh::bandwidth(vx.scale, g.n_edges)).epsilon(1e-12));
    double sum = 0.0;
    for (const auto& entry : g.incident[v])
      sum += msh::epanechnikov(entry.residual / vx.bandwidth) / (vx.scale * vx.bandwidth);
    const double expected = sum / vx.degree;
    CHECK(vx.weight == doctest::Approx(expected).epsilon(1e-12));
    CHECK(vx.weight == doctest::Approx(msh::vertex_weight(vx, g.incident[v])).epsilon(1e-12));
    CHECK(vx.weight >= 0.0);
  }
}

TEST_CASE("truncated weight agrees with the full-sum form on incident-only mass") {
  // Kernel support is |r| < b and b < E * scale here, so points outside the
  // incidence band contribute nothing and the two densities coincide up to
  // the different normalizations (degree vs n).
  msh::Rng rng(77);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 150;
  sc.rng_seed = 78;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto g = msh::build_hypergraph(pts, pool, 10, 2.5);
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& vx = g.vertices[v];
    if (vx.bandwidth > g.e_threshold * vx.scale) continue;
    const Eigen::VectorXd all = msh::residuals(vx.params, pts);
    const double full = msh::pi_weight(vx.scale, vx.bandwidth, all);
    CHECK(vx.weight * vx.degree ==
          doctest::Approx(full * static_cast<double>(g.n_edges)).epsilon(1e-9));
  }
}

TEST_CASE("good hypotheses outweigh clutter fits") {
  msh::Rng rng(79);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 600;
  sc.rng_seed = 80;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto g = msh::build_hypergraph(pts, pool, 10, 2.5);
  // The heaviest vertex must be one of the two genuine lines: horizontal
  // (|b| ~ 1) near y = 20 or y = 70 with a sub-unit scale.
  int best = 0;
  for (size_t v = 1; v < g.vertices.size(); ++v)
    if (g.vertices[v].weight > g.vertices[best].weight) best = static_cast<int>(v);
  const auto& top = g.vertices[best];
  const double y0 = -top.params.theta(2) / top.params.theta(1);
  CHECK(std::abs(top.params.theta(1)) > 0.99);
  CHECK((std::abs(y0 - 20.0) < 1.5 || std::abs(y0 - 70.0) < 1.5));
  CHECK(top.scale < 1.0);
}

TEST_CASE("hypergraph construction is independent of thread count") {
  msh::Rng rng(81);
  const auto pts = two_lines(rng);
  msh::SamplerConfig sc;
  sc.hypothesis_count = 250;
  sc.rng_seed = 82;
  const auto pool = msh::generate_hypotheses(pts, msh::ModelKind::Line2D, sc);
  const auto a = msh::build_hypergraph(pts, pool, 10, 2.5, 1);
  const auto b = msh::build_hypergraph(pts, pool, 10, 2.5, 8);
  REQUIRE(a.vertices.size() == b.vertices.size());
  for (size_t v = 0; v < a.vertices.size(); ++v) {
    CHECK((a.vertices[v].params.theta - b.vertices[v].params.theta).norm() == 0.0);
    CHECK(a.vertices[v].scale == b.vertices[v].scale);
    CHECK(a.vertices[v].weight == b.vertices[v].weight);
    CHECK(a.incident[v].size() == b.incident[v].size());
  }
}

TEST_CASE("hypotheses without a valid scale are dropped, empty survivor set throws") {
  // Three residual-distinct points cannot give any 2-point line hypothesis
  // K = 2 inliers beyond the subset itself at a tiny threshold; every scale
  // degenerates and the build must refuse.
  Eigen::MatrixXd pts(3, 2);
  pts << 0, 0, 50, 37, 90, 11;
  std::vector<msh::ModelParams> pool;
  pool.push_back(msh::fit_minimal(msh::ModelKind::Line2D, pts.topRows(2)));
  CHECK_THROWS_AS(msh::build_hypergraph(pts, pool, 2, 2.5), msh::EmptyHypergraph);
}

TEST_CASE("invalid build parameters are rejected") {
  msh::Rng rng(83);
  const auto pts = two_lines(rng);
  std::vector<msh::ModelParams> pool;
  pool.push_back(msh::fit_minimal(msh::ModelKind::Line2D, pts.topRows(2)));
  CHECK_THROWS_AS(msh::build_hypergraph(pts, pool, 0, 2.5), msh::Error);
  CHECK_THROWS_AS(msh::build_hypergraph(pts, pool, 10, 0.0), msh::Error);
  CHECK_THROWS_AS(msh::build_hypergraph(pts, {}, 10, 2.5), msh::Error);
}
