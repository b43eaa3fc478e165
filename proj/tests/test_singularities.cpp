#include <catch2/catch_amalgamated.hpp>

#include <frontal/gallery.hpp>
#include <frontal/singularities.hpp>

#include <cmath>
#include <random>

using frontal::Classification;
using frontal::DifferentiableMap;

TEST_CASE("the rank function vanishes exactly on rank drops", "[singularities]") {
  // phi(J) is the squared norm of the maximal minors, which equals
  // det(J^T J) by Cauchy-Binet: an oracle Eigen evaluates independently.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);

  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    Eigen::MatrixXd J(n + 1, n);
    for (int r = 0; r <= n; ++r)
      for (int c = 0; c < n; ++c) J(r, c) = entry(rng);

    const bool degenerate = trial % 3 == 0 && n > 1;
    if (degenerate) {
      // Force a rank drop by overwriting one column with a combination of
      // the others.
      Eigen::VectorXd combo = Eigen::VectorXd::Zero(n + 1);
      for (int c = 1; c < n; ++c) combo += entry(rng) * J.col(c);
      J.col(0) = combo;
    }

    const double phi = frontal::phi(J);
    const double oracle = (J.transpose() * J).determinant();
    const double scale = std::max(1.0, std::abs(oracle));
    CHECK(std::abs(phi - oracle) < 1e-9 * scale);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const bool full_rank =
        svd.singularValues()[n - 1] > 1e-9 * svd.singularValues()[0];
    if (degenerate || !full_rank) {
      CHECK(phi < 1e-9);
    } else {
      CHECK(phi > 0.0);
    }
  }
}

TEST_CASE("minors of the planar cusp", "[singularities]") {
  // (t^2, t^3) has Jacobian (2t, 3t^2); at t = 1 the two maximal minors are
  // 3 and 2 and phi = 13. At t = 0 the map is singular.
  const DifferentiableMap cusp = frontal::lookup("cusp").f;
  Eigen::VectorXd t(1);
  t << 1.0;
  const Eigen::MatrixXd J = frontal::jacobian_exact(cusp, t);
  const Eigen::VectorXd M = frontal::minors(J);
  REQUIRE(M.size() == 2);
  CHECK(M[0] == Catch::Approx(3.0));
  CHECK(M[1] == Catch::Approx(2.0));
  CHECK(frontal::phi(J) == Catch::Approx(13.0));

  t << 0.0;
  const auto rep = frontal::classify(cusp, t);
  CHECK(rep.classification == Classification::Singular);
  CHECK(rep.corank == 1);
  CHECK(rep.phi_value == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("surface with one singular point", "[singularities]") {
  const DifferentiableMap& f = frontal::lookup("crosscap").f;
  Eigen::VectorXd p(2);

  p << 0.0, 0.0;
  const auto origin = frontal::classify(f, p);
  CHECK(origin.classification == Classification::Singular);
  CHECK(origin.corank == 1);

  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    p << u(rng), u(rng);
    if (p.norm() < 1e-3) continue;
    CHECK(frontal::classify(f, p).classification == Classification::Regular);
  }
}

TEST_CASE("cofactor normal is unit, orthogonal and sign normalized", "[singularities]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const std::vector<std::string> names{"crosscap", "cuspidal_crosscap", "intro_cubic_graph"};
  for (const auto& name : names) {
    const frontal::GalleryEntry& e = frontal::lookup(name);
    const DifferentiableMap f = e.has_family ? e.family(1) : e.f;
    int accepted = 0;
    while (accepted < 60) {
      Eigen::VectorXd x(e.n);
      for (int i = 0; i < e.n; ++i) x[i] = u(rng);
      if (e.map_singular_residual(x) < 1e-2) continue;
      ++accepted;
      const Eigen::VectorXd nu = frontal::gauss_from_parametrization(f, x);
      CHECK(std::abs(nu.norm() - 1.0) < 1e-12);
      const Eigen::MatrixXd J = frontal::jacobian_exact(f, x);
      for (int c = 0; c < e.n; ++c) CHECK(std::abs(nu.dot(J.col(c))) < 1e-10);
      int imax = 0;
      for (int k = 1; k <= e.n; ++k)
        if (std::abs(nu[k]) > std::abs(nu[imax])) imax = k;
      CHECK(nu[imax] > 0.0);
    }
  }
}

TEST_CASE("cofactor normal refuses singular points", "[singularities]") {
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(
      frontal::gauss_from_parametrization(frontal::lookup("crosscap").f, origin),
      frontal::SingularPoint);
}

TEST_CASE("normal direction limits depend on the approach ray", "[singularities]") {
  // The crosscap admits no continuous normal at its singular point: the
  // limit along the first axis differs from the limit along the second.
  // (That is what separates it from the entries whose data extends.)
  const DifferentiableMap& f = frontal::lookup("crosscap").f;
  Eigen::VectorXd p(2);

  p << 1e-5, 0.0;
  const Eigen::VectorXd along_x = frontal::gauss_from_parametrization(f, p);
  p << 0.0, 1e-5;
  const Eigen::VectorXd along_y = frontal::gauss_from_parametrization(f, p);

  Eigen::VectorXd ex(3), ez(3);
  ex << 0.0, 1.0, 0.0;
  ez << 0.0, 0.0, 1.0;
  CHECK((along_x - ex).norm() < 1e-4);
  CHECK((along_y - ez).norm() < 1e-4);
  CHECK((along_x - along_y).norm() > 1.0);
}

TEST_CASE("derived normal field map matches the pointwise normal", "[singularities]") {
  const frontal::GalleryEntry& e = frontal::lookup("cuspidal_crosscap");
  const DifferentiableMap nu = frontal::gauss_map_of(e.f);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::VectorXd x(2);
    x << u(rng), u(rng);
    if (e.map_singular_residual(x) < 1e-2) continue;
    CHECK((nu(x) - frontal::gauss_from_parametrization(e.f, x)).norm() < 1e-12);
  }
}
