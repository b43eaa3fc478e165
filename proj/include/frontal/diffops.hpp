#pragma once

// Differentiation backends and limit extrapolation.
//  - jacobian_exact: forward mode duals, exact to rounding.
//  - jacobian_fd: second order central differences on grid fields, with
//    one sided 3 point stencils at the boundary.
//  - richardson_limit: polynomial extrapolation of samples v(t) to t = 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "frontal/dual.hpp"
#include "frontal/errors.hpp"
#include "frontal/grid.hpp"
#include "frontal/map.hpp"

namespace frontal {

namespace detail {

// Jacobian at scalar type T by seeding one input slot at a time.
// J is m*n row major; values (optional) receives the plain evaluation.
template <typename T>
void eval_jacobian(const DifferentiableMap& map, std::span<const T> x,
                   Dual<T>* J_rowmajor, T* values) {
  const int n = map.dimension_in();
  const int m = map.dimension_out();
  std::vector<Dual<T>> in(static_cast<std::size_t>(n));
  std::vector<Dual<T>> out(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = Dual<T>(x[static_cast<std::size_t>(i)]);
  for (int i = 0; i < n; ++i) {
    in[static_cast<std::size_t>(i)].der = T(1);
    map.eval(std::span<const Dual<T>>(in), std::span<Dual<T>>(out));
    for (int j = 0; j < m; ++j)
      J_rowmajor[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(j)];
    in[static_cast<std::size_t>(i)].der = T(0);
  }
  if (values != nullptr)
    for (int j = 0; j < m; ++j) values[j] = out[static_cast<std::size_t>(j)].val;
}

}  // namespace detail

// Entry (j, i) is d(component j)/dx_i at x, exact to rounding.
inline Eigen::MatrixXd jacobian_exact(const DifferentiableMap& map,
                                      const Eigen::VectorXd& x) {
  const int n = map.dimension_in();
  const int m = map.dimension_out();
  std::vector<Dual1> J(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  detail::eval_jacobian<double>(
      map, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
      J.data(), nullptr);
  Eigen::MatrixXd out(m, n);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const Dual1& e = J[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(i)];
      if (!is_finite(e)) throw DomainError("jacobian_exact: evaluator left its domain");
      out(j, i) = e.der;
    }
  return out;
}

// Evaluate map and exact Jacobian together (saves one pass).
inline void value_and_jacobian(const DifferentiableMap& map, const Eigen::VectorXd& x,
                               Eigen::VectorXd& value, Eigen::MatrixXd& J) {
  const int n = map.dimension_in();
  const int m = map.dimension_out();
  std::vector<Dual1> Jd(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  std::vector<double> val(static_cast<std::size_t>(m));
  detail::eval_jacobian<double>(
      map, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
      Jd.data(), val.data());
  value.resize(m);
  J.resize(m, n);
  for (int j = 0; j < m; ++j) {
    value[j] = val[static_cast<std::size_t>(j)];
    for (int i = 0; i < n; ++i) {
      const Dual1& e = Jd[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
                          static_cast<std::size_t>(i)];
      if (!is_finite(e)) throw DomainError("value_and_jacobian: evaluator left its domain");
      J(j, i) = e.der;
    }
  }
}

// Jacobian estimate at a grid node, at least second order everywhere. Deep
// interior nodes combine the stride 1 and stride 2 central differences into
// a refined (fourth order) estimate; nodes one step from the boundary use
// the plain central difference and boundary nodes the one sided 3 point
// stencil of matching order.
inline Eigen::MatrixXd jacobian_fd(const GridField& field, std::span<const int> node) {
  const int n = field.dimension();
  const int m = field.values_per_node;
  Eigen::MatrixXd J(m, n);
  std::vector<int> idx(node.begin(), node.end());
  for (int axis = 0; axis < n; ++axis) {
    const int count = static_cast<int>(field.axes[static_cast<std::size_t>(axis)].size());
    if (count < 3) throw Error("finite differences need at least 3 nodes per axis");
    const double h = field.spacing(axis);
    const int k = node[static_cast<std::size_t>(axis)];
    Eigen::VectorXd col(m);
    auto value_shift = [&](int offset) {
      idx[static_cast<std::size_t>(axis)] = k + offset;
      Eigen::VectorXd v = field.value_at(field.flat_index(idx));
      idx[static_cast<std::size_t>(axis)] = k;
      return v;
    };
    if (k >= 2 && k + 2 < count) {
      const Eigen::VectorXd d1 = (value_shift(+1) - value_shift(-1)) / (2.0 * h);
      const Eigen::VectorXd d2 = (value_shift(+2) - value_shift(-2)) / (4.0 * h);
      col = (4.0 * d1 - d2) / 3.0;
    } else if (k > 0 && k + 1 < count) {
      col = (value_shift(+1) - value_shift(-1)) / (2.0 * h);
    } else if (k == 0) {
      col = (-3.0 * value_shift(0) + 4.0 * value_shift(+1) - value_shift(+2)) / (2.0 * h);
    } else {
      col = (3.0 * value_shift(0) - 4.0 * value_shift(-1) + value_shift(-2)) / (2.0 * h);
    }
    J.col(axis) = col;
  }
  return J;
}

// Central difference Jacobian of a callable, step (machine eps)^(1/3) scaled
// by the coordinate magnitude. Used by cross checks and diagnostics.
template <typename Fn>
Eigen::MatrixXd jacobian_fd_map(Fn&& fn, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f0 = fn(x);
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(f0.size());
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd J(m, n);
  for (int i = 0; i < n; ++i) {
    const double h = cbrt_eps * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    J.col(i) = (fn(xp) - fn(xm)) / (xp[i] - xm[i]);
  }
  return J;
}

struct Extrapolant {
  Eigen::VectorXd value;
  double error_indicator = std::numeric_limits<double>::quiet_NaN();
};

// Polynomial-in-t^order extrapolation of samples (t, v) to t = 0 (Neville
// tableau). Steps must decrease geometrically with a fixed ratio within 1%.
// The error indicator is the max norm difference of the last two diagonal
// extrapolants.
inline Extrapolant richardson_limit(
    std::vector<std::pair<double, Eigen::VectorXd>> samples, int order = 2) {
  if (samples.size() < 3) throw InsufficientSamples();
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const double r0 = samples[0].first / samples[1].first;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double r = samples[k].first / samples[k + 1].first;
    if (!(r > 1.0) || std::abs(r - r0) > 0.01 * r0) throw NonGeometricSteps();
  }
  const std::size_t count = samples.size();
  std::vector<double> u(count);
  std::vector<Eigen::VectorXd> T(count);
  for (std::size_t k = 0; k < count; ++k) {
    u[k] = std::pow(samples[k].first, order);
    T[k] = samples[k].second;
  }
  Eigen::VectorXd prev_diag = T[0];
  Eigen::VectorXd diag = T[count - 1];
  // Column sweep: after stage s, T[k] interpolates samples k-s..k at u = 0.
  for (std::size_t s = 1; s < count; ++s) {
    for (std::size_t k = count - 1; k >= s; --k) {
      T[k] = (u[k - s] * T[k] - u[k] * T[k - 1]) / (u[k - s] - u[k]);
      if (k == s) break;
    }
    prev_diag = diag;
    diag = T[count - 1];
  }
  Extrapolant out;
  out.value = diag;
  out.error_indicator = (diag - prev_diag).cwiseAbs().maxCoeff();
  return out;
}

struct ScalarExtrapolant {
  double value;
  double error_indicator;
};

inline ScalarExtrapolant richardson_limit(
    const std::vector<std::pair<double, double>>& samples, int order = 2) {
  std::vector<std::pair<double, Eigen::VectorXd>> vec;
  vec.reserve(samples.size());
  for (const auto& [t, v] : samples)
    vec.emplace_back(t, Eigen::VectorXd::Constant(1, v));
  Extrapolant e = richardson_limit(std::move(vec), order);
  return {e.value[0], e.error_indicator};
}

}  // namespace frontal
