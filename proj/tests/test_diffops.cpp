#include <catch2/catch_amalgamated.hpp>

#include <frontal/diffops.hpp>
#include <frontal/gallery.hpp>
#include <frontal/grid.hpp>
#include <frontal/map.hpp>

#include <cmath>
#include <random>
#include <vector>

using frontal::DifferentiableMap;
using frontal::GridField;

namespace {

GridField sample_map(const DifferentiableMap& map,
                     const std::vector<std::vector<double>>& axes) {
  GridField g;
  g.axes = axes;
  g.values_per_node = map.dimension_out();
  g.values.assign(g.node_count() * static_cast<std::size_t>(g.values_per_node), 0.0);
  std::vector<int> idx(axes.size());
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    g.unflatten(node, idx);
    g.set_value(node, map(g.point_at(idx)));
  }
  return g;
}

// Largest entrywise error of the grid differences against the exact
// Jacobian, over every node including the boundary.
double max_fd_error(const DifferentiableMap& map, const GridField& g) {
  double worst = 0.0;
  std::vector<int> idx(g.axes.size());
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    g.unflatten(node, idx);
    const Eigen::MatrixXd J_fd = frontal::jacobian_fd(g, idx);
    const Eigen::MatrixXd J = frontal::jacobian_exact(map, g.point_at(idx));
    worst = std::max(worst, (J_fd - J).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("extrapolation recovers affine limits exactly", "[diffops]") {
  // v(t) = 5 + 3t sampled on a geometric ladder
  std::vector<std::pair<double, Eigen::VectorXd>> samples;
  for (double t : {0.8, 0.4, 0.2, 0.1})
    samples.emplace_back(t, Eigen::VectorXd::Constant(1, 5.0 + 3.0 * t));
  const frontal::Extrapolant e = frontal::richardson_limit(samples, 1);
  CHECK(e.value[0] == Catch::Approx(5.0).margin(1e-12));
  CHECK(e.error_indicator < 1e-10);
}

TEST_CASE("extrapolation with a known even error expansion", "[diffops]") {
  // cos(t) -> 1 as t -> 0 with error ~ t^2/2, so order 2 steps land on the
  // limit to high accuracy from coarse samples.
  std::vector<std::pair<double, Eigen::VectorXd>> samples;
  for (double t : {0.4, 0.2, 0.1, 0.05})
    samples.emplace_back(t, Eigen::VectorXd::Constant(1, std::cos(t)));
  const frontal::Extrapolant e = frontal::richardson_limit(samples, 2);
  CHECK(e.value[0] == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("extrapolation input validation", "[diffops]") {
  std::vector<std::pair<double, Eigen::VectorXd>> two;
  two.emplace_back(0.2, Eigen::VectorXd::Constant(1, 1.0));
  two.emplace_back(0.1, Eigen::VectorXd::Constant(1, 1.0));
  CHECK_THROWS_AS(frontal::richardson_limit(two, 1), frontal::InsufficientSamples);

  std::vector<std::pair<double, Eigen::VectorXd>> skewed;
  for (double t : {0.5, 0.25, 0.2})  // 2x then 1.25x: not geometric
    skewed.emplace_back(t, Eigen::VectorXd::Constant(1, t));
  CHECK_THROWS_AS(frontal::richardson_limit(skewed, 1), frontal::NonGeometricSteps);
}

TEST_CASE("exact jacobian of a polynomial surface", "[diffops]") {
  const DifferentiableMap map(2, 3, [](auto x, auto y) {
    y[0] = x[0];
    y[1] = x[1] * x[1];
    y[2] = x[1] * x[1] * x[1];
  });
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  const Eigen::MatrixXd J = frontal::jacobian_exact(map, p);
  Eigen::MatrixXd expect(3, 2);
  expect << 1, 0, 0, 1, 0, 0.75;
  CHECK((J - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("grid differences converge at second order or better", "[diffops]") {
  // The worst node of a refined grid should improve by at least ~2^1.9 per
  // halving: interior stencils are better than second order and the
  // boundary stencils are exactly second order, so the global rate sits at
  // two. Smooth random trigonometric maps exercise every stencil branch.
  std::mt19937_64 rng(0x5eedf00dULL);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  double min_order = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 12; ++trial) {
    const double a0 = coeff(rng), a1 = coeff(rng), a2 = coeff(rng), a3 = coeff(rng);
    const DifferentiableMap map(2, 2, [=](auto x, auto y) {
      y[0] = sin(a0 + 1.3 * x[0]) * cos(a1 + 0.7 * x[1]);
      y[1] = exp(0.3 * a2 * x[0]) + sin(a3 + x[0] * x[1]);
    });
    std::vector<double> errs;
    for (int count : {21, 41}) {
      const auto ax = frontal::make_axis(-1.0, 1.0, count);
      errs.push_back(max_fd_error(map, sample_map(map, {ax, ax})));
    }
    const double order = std::log2(errs[0] / errs[1]);
    min_order = std::min(min_order, order);
  }
  CHECK(min_order >= 1.9);
}

TEST_CASE("grid differences track an analytic gradient closely inside", "[diffops]") {
  // Height function of the gallery's degree four surface on a fine grid:
  // away from the boundary the refined stencils leave errors far below the
  // coarse second order budget.
  const frontal::GalleryEntry& entry = frontal::lookup("cuspidal_crosscap");
  const DifferentiableMap a = entry.a_closed(0);
  const auto ax = frontal::make_axis(-1.0, 1.0, 201);  // h = 0.01
  const GridField g = sample_map(a, {ax, ax});

  double worst = 0.0;
  std::vector<int> idx(2);
  for (std::size_t node = 0; node < g.node_count(); ++node) {
    g.unflatten(node, idx);
    if (idx[0] < 2 || idx[0] > 198 || idx[1] < 2 || idx[1] > 198) continue;
    const Eigen::MatrixXd J_fd = frontal::jacobian_fd(g, idx);
    const Eigen::MatrixXd J = frontal::jacobian_exact(a, g.point_at(idx));
    worst = std::max(worst, (J_fd - J).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("grid differences need three nodes per axis", "[diffops]") {
  GridField g;
  g.axes = {frontal::make_axis(0.0, 1.0, 2)};
  g.values_per_node = 1;
  g.values = {0.0, 1.0};
  std::vector<int> idx{0};
  CHECK_THROWS_AS(frontal::jacobian_fd(g, idx), frontal::Error);
}
