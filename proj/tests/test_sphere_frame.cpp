#include <catch2/catch_amalgamated.hpp>

#include <frontal/dual.hpp>
#include <frontal/sphere_frame.hpp>

#include <cmath>
#include <random>
#include <vector>

using frontal::AngleVector;
using frontal::Dual1;
using frontal::Frame;

namespace {

// d(nu)/d(theta_i) through dual numbers: an oracle independent of the
// closed form frame expressions.
Eigen::VectorXd nu_partial(const AngleVector& theta, int i) {
  const int n = static_cast<int>(theta.size());
  std::vector<Dual1> t(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)] = {theta[j], j == i ? 1.0 : 0.0};
  std::vector<Dual1> out(static_cast<std::size_t>(n) + 1);
  frontal::detail::nu_sphere_eval<Dual1>(t.data(), n, out.data());
  Eigen::VectorXd d(n + 1);
  for (int k = 0; k <= n; ++k) d[k] = out[static_cast<std::size_t>(k)].der;
  return d;
}

AngleVector random_angles(std::mt19937_64& rng, int n, double cap) {
  std::uniform_real_distribution<double> leading(-cap, cap);
  std::uniform_real_distribution<double> last(-3.0, 3.0);
  AngleVector theta(n);
  for (int j = 0; j + 1 < n; ++j) theta[j] = leading(rng);
  theta[n - 1] = n == 1 ? last(rng) : leading(rng);
  return theta;
}

}  // namespace

TEST_CASE("spherical parametrization hits the unit sphere", "[sphere_frame]") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      const AngleVector theta = random_angles(rng, n, 1.5);
      CHECK(std::abs(frontal::nu_sphere(theta).norm() - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("frame is orthonormal and matches the dual derivative", "[sphere_frame]") {
  std::mt19937_64 rng(17);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const AngleVector theta = random_angles(rng, n, 1.2);
      const Frame fr = frontal::frame(theta);

      // Orthonormality of {nu, mu_hat_0..mu_hat_{n-1}}.
      CHECK(std::abs(fr.nu.norm() - 1.0) < 1e-12);
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(fr.mu_hat[static_cast<std::size_t>(i)].norm() - 1.0) < 1e-12);
        CHECK(std::abs(fr.nu.dot(fr.mu_hat[static_cast<std::size_t>(i)])) < 1e-12);
        for (int j = i + 1; j < n; ++j)
          CHECK(std::abs(fr.mu_hat[static_cast<std::size_t>(i)]
                             .dot(fr.mu_hat[static_cast<std::size_t>(j)])) < 1e-12);
      }

      // The derivative d(nu)/d(theta_i) equals rho_i * mu_hat_i, so its
      // norm is the prefix cosine product in magnitude.
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd d = nu_partial(theta, i);
        double prod = 1.0;
        for (int j = 0; j < i; ++j) prod *= std::cos(theta[j]);
        CHECK(std::abs(fr.rho[i] - prod) < 1e-14);
        CHECK(std::abs(d.norm() - std::abs(prod)) < 1e-12);
        CHECK((d - fr.rho[i] * fr.mu_hat[static_cast<std::size_t>(i)]).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("angle extraction inverts the parametrization", "[sphere_frame]") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const AngleVector theta = random_angles(rng, n, 1.3);
      const Eigen::VectorXd v = frontal::nu_sphere(theta);
      const AngleVector back = frontal::extract_angles(v);
      CHECK((back - theta).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((frontal::nu_sphere(back) - v).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("extraction at a worked normal direction", "[sphere_frame]") {
  // v = (-2, -3, 2)/sqrt(17): the first angle satisfies sin = 2/sqrt(17)
  // and the second lands in the third quadrant with sin = -3/sqrt(13),
  // cos = -2/sqrt(13).
  Eigen::VectorXd v(3);
  v << -2.0, -3.0, 2.0;
  v /= std::sqrt(17.0);
  const AngleVector theta = frontal::extract_angles(v);
  REQUIRE(theta.size() == 2);
  CHECK(std::sin(theta[0]) == Catch::Approx(2.0 / std::sqrt(17.0)).margin(1e-14));
  CHECK(std::sin(theta[1]) == Catch::Approx(-3.0 / std::sqrt(13.0)).margin(1e-14));
  CHECK(std::cos(theta[1]) == Catch::Approx(-2.0 / std::sqrt(13.0)).margin(1e-14));
  CHECK((frontal::nu_sphere(theta) - v).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("chart poles and bad input are rejected", "[sphere_frame]") {
  SECTION("non unit input") {
    Eigen::VectorXd v(3);
    v << 0.5, 0.5, 0.5;
    CHECK_THROWS_AS(frontal::extract_angles(v), frontal::NotUnit);
  }

  SECTION("north pole of the leading angle") {
    Eigen::VectorXd v(3);
    v << 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(frontal::extract_angles(v), frontal::ChartPole);
  }

  SECTION("frame at a degenerate prefix product") {
    AngleVector theta(2);
    theta << M_PI / 2.0, 0.3;
    CHECK_THROWS_AS(frontal::frame(theta), frontal::ChartPole);
  }

  SECTION("the full range last angle has no pole for curves") {
    Eigen::VectorXd v(2);
    v << -1.0, 0.0;  // theta = pi, fine on the circle
    const AngleVector theta = frontal::extract_angles(v);
    CHECK((frontal::nu_sphere(theta) - v).cwiseAbs().maxCoeff() < 1e-15);
  }
}
