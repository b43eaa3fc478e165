#pragma once

// Spherical parametrization of the unit n-sphere by n angles, its companion
// orthonormal frame, and the inverse angle extraction.
//
// Component layout of the parametrization (0 indexed, angles theta[0..n-1]):
//   out[0] = prod_{j<n} cos(theta[j])
//   out[k] = sin(theta[n-k]) * prod_{j<n-k} cos(theta[j])     for k = 1..n
// so out[n] = sin(theta[0]) and for n = 2 the map reads
// (cos t1 cos t2, cos t1 sin t2, sin t1) with (t1, t2) = (theta[0], theta[1]).
//
// The principal branch keeps cos(theta[i]) > 0 for i = 0..n-2; the last
// angle runs over (-pi, pi] and is produced by atan2.

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "frontal/dual.hpp"
#include "frontal/errors.hpp"

namespace frontal {

using AngleVector = Eigen::VectorXd;

inline constexpr double kPoleEpsilon = 1e-8;
inline constexpr double kUnitTolerance = 1e-8;

struct Frame {
  Eigen::VectorXd nu;                    // n+1 components, unit
  std::vector<Eigen::VectorXd> mu_hat;   // n unit vectors, n+1 components each
  Eigen::VectorXd rho;                   // rho[i] = prod_{j<i} cos(theta[j])
};

namespace detail {

template <typename T>
void nu_sphere_eval(const T* theta, int n, T* out) {
  // Prefix products of cosines: P[m] = prod_{j<m} cos(theta[j]).
  std::vector<T> P(static_cast<std::size_t>(n) + 1);
  P[0] = T(1);
  for (int j = 0; j < n; ++j)
    P[static_cast<std::size_t>(j) + 1] = P[static_cast<std::size_t>(j)] * cos(theta[j]);
  out[0] = P[static_cast<std::size_t>(n)];
  for (int k = 1; k <= n; ++k) {
    const int s = n - k;
    out[k] = sin(theta[s]) * P[static_cast<std::size_t>(s)];
  }
}

// Unit frame vector mu_hat[i] (= d(nu)/d(theta_i) with the prefix cosine
// product factored out), written in closed form so no division occurs:
//   comp 0           = -sin(theta[i]) * prod_{i<j<n} cos(theta[j])
//   comp k, s = n-k  =  cos(theta[i])                          if s == i
//                     -sin(theta[s]) sin(theta[i]) *
//                        prod_{i<j<s} cos(theta[j])            if s > i
//                      0                                       if s < i
template <typename T>
void mu_hat_eval(const T* theta, int n, int i, T* out) {
  T suffix = T(1);
  for (int j = i + 1; j < n; ++j) suffix *= cos(theta[j]);
  out[0] = -sin(theta[i]) * suffix;
  for (int k = 1; k <= n; ++k) {
    const int s = n - k;
    if (s == i) {
      out[k] = cos(theta[i]);
    } else if (s > i) {
      T mid = T(1);
      for (int j = i + 1; j < s; ++j) mid *= cos(theta[j]);
      out[k] = -sin(theta[s]) * sin(theta[i]) * mid;
    } else {
      out[k] = T(0);
    }
  }
}

}  // namespace detail

inline Eigen::VectorXd nu_sphere(const AngleVector& theta) {
  const int n = static_cast<int>(theta.size());
  Eigen::VectorXd out(n + 1);
  detail::nu_sphere_eval<double>(theta.data(), n, out.data());
  return out;
}

// Companion frame at theta. rho carries the signed prefix cosine products;
// on the principal branch they are the frame vector norms. Throws ChartPole
// when a prefix product degenerates below pole_eps in magnitude.
inline Frame frame(const AngleVector& theta, double pole_eps = kPoleEpsilon) {
  const int n = static_cast<int>(theta.size());
  Frame fr;
  fr.nu.resize(n + 1);
  detail::nu_sphere_eval<double>(theta.data(), n, fr.nu.data());
  fr.rho.resize(n);
  double P = 1.0;
  for (int i = 0; i < n; ++i) {
    fr.rho[i] = P;
    if (std::abs(P) < pole_eps) throw ChartPole("frame: prefix cosine product vanished");
    P *= std::cos(theta[i]);
  }
  fr.mu_hat.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd mu(n + 1);
    detail::mu_hat_eval<double>(theta.data(), n, i, mu.data());
    fr.mu_hat[static_cast<std::size_t>(i)] = mu;
  }
  return fr;
}

// Inverse of nu_sphere on the principal branch. theta[0..n-2] come from
// arcsines (cos > 0), theta[n-1] from atan2 with full range (-pi, pi].
inline AngleVector extract_angles(const Eigen::VectorXd& v,
                                  double pole_eps = kPoleEpsilon) {
  const int n = static_cast<int>(v.size()) - 1;
  if (n < 1) throw Error("extract_angles: need at least 2 components");
  if (std::abs(v.norm() - 1.0) > kUnitTolerance)
    throw NotUnit("extract_angles: input is off the unit sphere");
  AngleVector theta(n);
  auto clamped_asin = [](double s) {
    return std::asin(std::min(1.0, std::max(-1.0, s)));
  };
  double P = 1.0;  // prod of cos(theta[j]) over extracted leading angles
  for (int j = 0; j + 1 < n; ++j) {
    if (P < pole_eps) throw ChartPole("extract_angles: chart pole");
    theta[j] = clamped_asin(v[n - j] / P);
    P *= std::cos(theta[j]);
  }
  if (P < pole_eps) throw ChartPole("extract_angles: chart pole");
  theta[n - 1] = std::atan2(v[1] / P, v[0] / P);
  return theta;
}

}  // namespace frontal
