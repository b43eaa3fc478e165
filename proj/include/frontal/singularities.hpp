#pragma once

// Regularity diagnostics: maximal Jacobian minors, their sum of squares,
// pointwise rank classification, and normal fields derived from a
// parametrization via alternating cofactors.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "frontal/diffops.hpp"
#include "frontal/dual.hpp"
#include "frontal/errors.hpp"
#include "frontal/map.hpp"

namespace frontal {

inline constexpr double kRankEpsilon = 1e-9;
inline constexpr double kPhiEpsilon = kRankEpsilon * kRankEpsilon;

enum class Classification { Regular, Singular };

struct RegularityReport {
  double phi_value = 0.0;
  int corank = 0;
  Classification classification = Classification::Regular;
};

namespace detail {

// Determinant by Laplace expansion over generic scalars (duals included).
// Dimensions here are tiny (n <= 4), so the factorial cost is irrelevant.
template <typename T>
T det_recursive(const std::vector<T>& A, const std::vector<int>& rows,
                const std::vector<int>& cols, std::size_t stride) {
  const std::size_t k = rows.size();
  if (k == 1) return A[static_cast<std::size_t>(rows[0]) * stride + static_cast<std::size_t>(cols[0])];
  T acc = T(0);
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<int> sub_cols;
    sub_cols.reserve(k - 1);
    for (std::size_t cc = 0; cc < k; ++cc)
      if (cc != c) sub_cols.push_back(cols[cc]);
    T term = A[static_cast<std::size_t>(rows[0]) * stride + static_cast<std::size_t>(cols[c])] *
             det_recursive(A, sub_rows, sub_cols, stride);
    if (c % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

// Minors of an (n+1) x n row major matrix at generic scalar type.
template <typename T>
void minors_eval(const std::vector<T>& J, int n, std::vector<T>& M) {
  M.resize(static_cast<std::size_t>(n) + 1);
  std::vector<int> cols(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) cols[static_cast<std::size_t>(c)] = c;
  for (int skip = 0; skip <= n; ++skip) {
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int r = 0; r <= n; ++r)
      if (r != skip) rows.push_back(r);
    M[static_cast<std::size_t>(skip)] =
        n == 0 ? T(1) : det_recursive(J, rows, cols, static_cast<std::size_t>(n));
  }
}

}  // namespace detail

// M[k] = determinant of J with row k removed. J must be (n+1) x n.
inline Eigen::VectorXd minors(const Eigen::MatrixXd& J) {
  const int n = static_cast<int>(J.cols());
  if (J.rows() != n + 1) throw Error("minors: expected an (n+1) x n matrix");
  std::vector<double> flat(static_cast<std::size_t>((n + 1) * n));
  for (int r = 0; r <= n; ++r)
    for (int c = 0; c < n; ++c)
      flat[static_cast<std::size_t>(r * n + c)] = J(r, c);
  std::vector<double> M;
  detail::minors_eval(flat, n, M);
  Eigen::VectorXd out(n + 1);
  for (int k = 0; k <= n; ++k) out[k] = M[static_cast<std::size_t>(k)];
  return out;
}

// Sum of squared maximal minors; vanishes exactly when rank J < n.
inline double phi(const Eigen::MatrixXd& J) {
  return minors(J).squaredNorm();
}

// Pointwise rank report. Corank counts singular values below
// rank_eps * (largest singular value); the map is regular iff corank is 0.
inline RegularityReport classify(const DifferentiableMap& map, const Eigen::VectorXd& x,
                                 double rank_eps = kRankEpsilon) {
  Eigen::MatrixXd J = jacobian_exact(map, x);
  RegularityReport rep;
  rep.phi_value = phi(J);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > rank_eps * smax && sv[i] > 0.0) ++rank;
  rep.corank = static_cast<int>(J.cols()) - rank;
  rep.classification = rep.corank == 0 ? Classification::Regular : Classification::Singular;
  return rep;
}

// Unit normal at a regular point: alternating cofactor vector
// w[k] = (-1)^k M[k], normalized, sign fixed so the component of largest
// magnitude is positive. Orthogonal to every Jacobian column.
inline Eigen::VectorXd gauss_from_parametrization(const DifferentiableMap& f,
                                                  const Eigen::VectorXd& x,
                                                  double rank_eps = kRankEpsilon) {
  const int n = f.dimension_in();
  Eigen::MatrixXd J = jacobian_exact(f, x);
  Eigen::VectorXd M = minors(J);
  Eigen::VectorXd w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = (k % 2 == 0 ? M[k] : -M[k]);
  const double phi_v = w.squaredNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
  const double scale = std::pow(smax, 2 * n);
  if (phi_v <= rank_eps * rank_eps * scale || phi_v == 0.0)
    throw SingularPoint("gauss_from_parametrization: singular point");
  w /= w.norm();
  int imax = 0;
  for (int k = 1; k <= n; ++k)
    if (std::abs(w[k]) > std::abs(w[imax])) imax = k;
  if (w[imax] < 0.0) w = -w;
  return w;
}

// The derived normal field as a differentiable map. Evaluating its value
// needs first derivatives of f; differentiating it needs second derivatives,
// so this wrapper supports real and first order dual evaluation only.
// The largest magnitude component is made positive per point (the sign choice
// can jump between points; recovery treats each point independently).
inline DifferentiableMap gauss_map_of(const DifferentiableMap& f) {
  const int n = f.dimension_in();
  const int m = f.dimension_out();
  if (m != n + 1) throw Error("gauss_map_of: map must go from R^n to R^(n+1)");
  auto kernel = [f, n](auto x, auto out) {
    using T = std::remove_cv_t<typename decltype(out)::value_type>;
    std::vector<Dual<T>> J(static_cast<std::size_t>((n + 1) * n));
    detail::eval_jacobian<T>(f, x, J.data(), static_cast<T*>(nullptr));
    std::vector<T> Jv(J.size());
    for (std::size_t e = 0; e < J.size(); ++e) Jv[e] = J[e].der;
    std::vector<T> M;
    detail::minors_eval(Jv, n, M);
    T norm2 = T(0);
    for (int k = 0; k <= n; ++k) {
      if (k % 2 == 1) M[static_cast<std::size_t>(k)] = -M[static_cast<std::size_t>(k)];
      norm2 += M[static_cast<std::size_t>(k)] * M[static_cast<std::size_t>(k)];
    }
    T inv = T(1) / sqrt(norm2);
    int imax = 0;
    for (int k = 1; k <= n; ++k)
      if (std::abs(scalar_value(M[static_cast<std::size_t>(k)])) >
          std::abs(scalar_value(M[static_cast<std::size_t>(imax)])))
        imax = k;
    if (scalar_value(M[static_cast<std::size_t>(imax)]) < 0.0) inv = -inv;
    for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = M[static_cast<std::size_t>(k)] * inv;
  };
  // eval_jacobian at T needs f on Dual<T>; expose real via Dual1 and first
  // derivatives via Dual2. Second derivatives would need a third nesting
  // level, which f does not carry.
  DifferentiableMap::RealFn real = [kernel](std::span<const double> x, std::span<double> y) {
    kernel(x, y);
  };
  DifferentiableMap::Dual1Fn dual1 = [kernel](std::span<const Dual1> x, std::span<Dual1> y) {
    kernel(x, y);
  };
  return DifferentiableMap(n, n + 1, real, dual1, {});
}

}  // namespace frontal
