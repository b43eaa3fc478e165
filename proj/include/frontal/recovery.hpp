#pragma once

// Reconstruction of a parametrization from its normal field and height
// function. Per point: extract spherical angles from the normal, project the
// normal's derivative onto the companion frame to get the angle differential,
// solve the coefficient system, assemble the point. Chart poles are worked
// around by seeded random rotations; rank deficient points are resolved by
// probing nearby regular points and extrapolating the limit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frontal/diffops.hpp"
#include "frontal/errors.hpp"
#include "frontal/grid.hpp"
#include "frontal/map.hpp"
#include "frontal/sphere_frame.hpp"

namespace frontal {

inline constexpr double kDetEpsilon = 1e-10;

enum class Backend { Exact, FiniteDifference };
enum class PointStatus { Regular, ExtendedByLimit, Unresolved };

// Normal field and height function over a box domain, either analytic
// (exact derivatives) or sampled on a grid (finite differences). Mixing
// backends is rejected by construction.
struct LegendreData {
  int n = 0;
  Backend backend = Backend::Exact;

  DifferentiableMap nu_map;  // n -> n+1, unit valued (analytic mode)
  DifferentiableMap a_map;   // n -> 1 (analytic mode)
  Eigen::VectorXd lo, hi;

  GridField nu_grid;           // values_per_node = n+1 (sampled mode)
  GridField a_grid;            // values_per_node = 1 (sampled mode)
  std::vector<std::uint8_t> mask;  // optional, 1 = usable node

  static LegendreData analytic(DifferentiableMap nu, DifferentiableMap a,
                               Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (nu.dimension_out() != nu.dimension_in() + 1 || a.dimension_out() != 1 ||
        a.dimension_in() != nu.dimension_in())
      throw ConfigError("LegendreData: dimension mismatch");
    LegendreData d;
    d.n = nu.dimension_in();
    d.backend = Backend::Exact;
    d.nu_map = std::move(nu);
    d.a_map = std::move(a);
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    return d;
  }

  static LegendreData sampled(GridField nu, GridField a,
                              std::vector<std::uint8_t> mask = {}) {
    nu.validate();
    a.validate();
    const int n = nu.dimension();
    if (nu.values_per_node != n + 1 || a.values_per_node != 1 ||
        a.dimension() != n || a.node_count() != nu.node_count())
      throw ConfigError("LegendreData: grid shape mismatch");
    if (!mask.empty() && mask.size() != nu.node_count())
      throw ConfigError("LegendreData: mask length mismatch");
    LegendreData d;
    d.n = n;
    d.backend = Backend::FiniteDifference;
    d.lo.resize(n);
    d.hi.resize(n);
    for (int i = 0; i < n; ++i) {
      d.lo[i] = nu.axes[static_cast<std::size_t>(i)].front();
      d.hi[i] = nu.axes[static_cast<std::size_t>(i)].back();
    }
    d.nu_grid = std::move(nu);
    d.a_grid = std::move(a);
    d.mask = std::move(mask);
    return d;
  }

  bool analytic_mode() const { return backend == Backend::Exact; }

  double domain_scale() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s = std::max(s, hi[i] - lo[i]);
    return s > 0.0 ? s : 1.0;
  }
};

struct RecoverOptions {
  double det_epsilon = kDetEpsilon;
  double pole_epsilon = kPoleEpsilon;
  std::uint64_t seed = 0x7261646f6eull;
  int max_rotations = 3;            // random retries after the identity chart
  bool allow_extension = true;
  std::vector<double> extension_steps;  // analytic probe steps; empty = default
};

struct PointRecovery {
  PointStatus status = PointStatus::Unresolved;
  Eigen::VectorXd f;  // n+1 components; NaN filled when unresolved
  Eigen::VectorXd b;  // n coefficients; set at Regular points only
  bool chart_pole = false;
  int rotation_index = 0;
  double extension_indicator = std::numeric_limits<double>::quiet_NaN();
};

// Recovered grid plus per node diagnostics. The coefficient grid carries the
// solved b at Regular nodes and NaN elsewhere.
struct RecoveredMap {
  GridField f;
  GridField b;
  std::vector<PointStatus> status;
  std::vector<std::uint8_t> chart_pole;
  std::vector<double> height_residual;
  std::size_t regular_count = 0;
  std::size_t extended_count = 0;
  std::size_t unresolved_count = 0;
  double max_height_residual = 0.0;
  double rms_height_residual = 0.0;
  double max_tangency_residual = 0.0;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline Eigen::MatrixXd random_rotation(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) A(r, c) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ();
  if (Q.determinant() < 0.0) Q.col(d - 1) = -Q.col(d - 1);
  return Q;
}

inline Eigen::VectorXd random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// Raw Legendre values at one evaluation site.
struct PointEval {
  Eigen::VectorXd nu;   // n+1
  Eigen::MatrixXd Jnu;  // (n+1) x n, column i = d(nu)/dx_i
  double a = 0.0;
  Eigen::VectorXd da;   // n
};

inline PointEval eval_analytic(const LegendreData& data, const Eigen::VectorXd& x) {
  PointEval ev;
  value_and_jacobian(data.nu_map, x, ev.nu, ev.Jnu);
  Eigen::VectorXd aval;
  Eigen::MatrixXd Ja;
  value_and_jacobian(data.a_map, x, aval, Ja);
  ev.a = aval[0];
  ev.da = Ja.row(0).transpose();
  return ev;
}

// Mask aware grid Jacobian: stencils must not touch masked nodes. Interior
// nodes fall back to the one sided 3 point stencil when a masked neighbor
// blocks the central one; a fully blocked axis raises SingularChart so the
// caller moves on to limit extension.
inline Eigen::MatrixXd jacobian_fd_masked(const GridField& field, std::span<const int> node,
                                          const std::vector<std::uint8_t>& mask) {
  if (mask.empty()) return jacobian_fd(field, node);
  const int n = field.dimension();
  const int m = field.values_per_node;
  Eigen::MatrixXd J(m, n);
  std::vector<int> idx(node.begin(), node.end());
  for (int axis = 0; axis < n; ++axis) {
    const int count = static_cast<int>(field.axes[static_cast<std::size_t>(axis)].size());
    const double h = field.spacing(axis);
    const int k = node[static_cast<std::size_t>(axis)];
    auto usable = [&](int offset) {
      const int j = k + offset;
      if (j < 0 || j >= count) return false;
      idx[static_cast<std::size_t>(axis)] = j;
      const bool ok = mask[field.flat_index(idx)] != 0;
      idx[static_cast<std::size_t>(axis)] = k;
      return ok;
    };
    auto value_shift = [&](int offset) {
      idx[static_cast<std::size_t>(axis)] = k + offset;
      Eigen::VectorXd v = field.value_at(field.flat_index(idx));
      idx[static_cast<std::size_t>(axis)] = k;
      return v;
    };
    if (usable(-2) && usable(-1) && usable(+1) && usable(+2)) {
      const Eigen::VectorXd d1 = (value_shift(+1) - value_shift(-1)) / (2.0 * h);
      const Eigen::VectorXd d2 = (value_shift(+2) - value_shift(-2)) / (4.0 * h);
      J.col(axis) = (4.0 * d1 - d2) / 3.0;
    } else if (usable(-1) && usable(+1)) {
      J.col(axis) = (value_shift(+1) - value_shift(-1)) / (2.0 * h);
    } else if (usable(+1) && usable(+2)) {
      J.col(axis) = (-3.0 * value_shift(0) + 4.0 * value_shift(+1) - value_shift(+2)) / (2.0 * h);
    } else if (usable(-1) && usable(-2)) {
      J.col(axis) = (3.0 * value_shift(0) - 4.0 * value_shift(-1) + value_shift(-2)) / (2.0 * h);
    } else {
      throw SingularChart("finite differences: stencil blocked by masked nodes");
    }
  }
  return J;
}

inline PointEval eval_sampled(const LegendreData& data, std::span<const int> node) {
  PointEval ev;
  const std::size_t flat = data.nu_grid.flat_index(node);
  ev.nu = data.nu_grid.value_at(flat);
  ev.Jnu = jacobian_fd_masked(data.nu_grid, node, data.mask);
  ev.a = data.a_grid.value_at(flat)[0];
  ev.da = jacobian_fd_masked(data.a_grid, node, data.mask).row(0).transpose();
  return ev;
}

// A chart whose smallest prefix cosine product falls below this floor still
// extracts, but amplifies roundoff by its reciprocal; such attempts are
// retried under a rotation and kept only as a last resort.
inline constexpr double kChartQualityFloor = 1e-3;

// A column of the normal field Jacobian below this fraction of the largest
// column is indistinguishable from evaluation roundoff: treating it as data
// would divide noise by noise. Well above machine epsilon, well below any
// chart-induced smallness the rotation retries can repair.
inline constexpr double kColumnRankRatio = 1e-12;

// One point of the core pipeline on already evaluated data. Throws
// SingularChart when a well conditioned chart shows a rank deficient angle
// differential (a genuine normal field singularity, which no rotation can
// repair) and ChartPole when every chart attempt degenerated.
inline PointRecovery recover_from_values(const PointEval& ev, int n,
                                         const RecoverOptions& opts,
                                         std::uint64_t point_seed) {
  if (std::abs(ev.nu.norm() - 1.0) > kUnitTolerance)
    throw NotUnit("recover: normal field is off the unit sphere");
  // The rotations below preserve the column norms of the data Jacobian, so a
  // direction in which the normal field does not move marks a rank drop of
  // the data itself; no chart can solve for a coefficient from a column of
  // roundoff. The relative determinant test cannot see this case, because it
  // normalizes the noise row away.
  double col_max = 0.0;
  double col_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double c = ev.Jnu.col(i).norm();
    col_max = std::max(col_max, c);
    col_min = std::min(col_min, c);
  }
  if (!(col_min > kColumnRankRatio * col_max))
    throw SingularChart("recover: normal field differential is rank deficient");
  std::optional<PointRecovery> fallback;
  double fallback_quality = -1.0;
  for (int attempt = 0; attempt <= opts.max_rotations; ++attempt) {
    Eigen::MatrixXd R;
    Eigen::VectorXd w;
    Eigen::MatrixXd Jw;
    if (attempt == 0) {
      w = ev.nu;
      Jw = ev.Jnu;
    } else {
      R = random_rotation(n + 1, mix_seed(point_seed, static_cast<std::uint64_t>(attempt)));
      w = R * ev.nu;
      Jw = R * ev.Jnu;
    }
    AngleVector theta;
    Frame fr;
    try {
      theta = extract_angles(w, opts.pole_epsilon);
      fr = frame(theta, opts.pole_epsilon);
    } catch (const ChartPole&) {
      continue;
    }
    double quality = 1.0;
    for (int j = 0; j < n; ++j) quality = std::min(quality, std::abs(fr.rho[j]));
    // Angle differential via frame projection: the chain rule gives
    // d(nu)/dx_i = sum_j (d theta_j/dx_i) mu_tilde_j, and the frame is
    // orthogonal, so d theta_j/dx_i = mu_hat_j . d(nu)/dx_i / rho_j.
    Eigen::MatrixXd dtheta(n, n);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd& mu = fr.mu_hat[static_cast<std::size_t>(j)];
      for (int i = 0; i < n; ++i) dtheta(i, j) = mu.dot(Jw.col(i)) / fr.rho[j];
    }
    double row_norm_product = 1.0;
    for (int i = 0; i < n; ++i) row_norm_product *= dtheta.row(i).norm();
    const double det = dtheta.determinant();
    if (!(std::abs(det) > opts.det_epsilon * row_norm_product)) {
      // Near a pole the amplified column makes the rows nearly parallel, so
      // the failure may be an artifact of the chart; judge only from a well
      // conditioned one.
      if (quality >= kChartQualityFloor)
        throw SingularChart("recover: angle differential is rank deficient");
      continue;
    }
    Eigen::VectorXd b = dtheta.fullPivLu().solve(ev.da);
    Eigen::VectorXd f_rot = ev.a * w;
    for (int j = 0; j < n; ++j)
      f_rot += (b[j] / fr.rho[j]) * fr.mu_hat[static_cast<std::size_t>(j)];
    PointRecovery out;
    out.status = PointStatus::Regular;
    out.f = attempt == 0 ? f_rot : Eigen::VectorXd(R.transpose() * f_rot);
    out.b = std::move(b);
    out.chart_pole = attempt > 0;
    out.rotation_index = attempt;
    if (quality >= kChartQualityFloor) return out;
    if (quality > fallback_quality) {
      fallback_quality = quality;
      fallback = std::move(out);
    }
  }
  if (fallback) return *fallback;
  throw ChartPole("recover: all chart attempts degenerated");
}

inline PointRecovery recover_direct_analytic(const LegendreData& data,
                                             const Eigen::VectorXd& x,
                                             const RecoverOptions& opts,
                                             std::uint64_t point_seed) {
  return recover_from_values(eval_analytic(data, x), data.n, opts, point_seed);
}

inline PointRecovery recover_direct_sampled(const LegendreData& data,
                                            std::span<const int> node,
                                            const RecoverOptions& opts,
                                            std::uint64_t point_seed) {
  if (!data.mask.empty() && data.mask[data.nu_grid.flat_index(node)] == 0)
    throw SingularChart("recover: node is masked");
  return recover_from_values(eval_sampled(data, node), data.n, opts, point_seed);
}

// Longest suffix of consecutive successes keeps the sample steps geometric;
// extrapolate that run to step zero with a first order model.
struct ProbeAccumulator {
  std::vector<std::pair<double, Eigen::VectorXd>> run;
  std::optional<Extrapolant> best;

  void fail() { run.clear(); }
  void succeed(double t, const Eigen::VectorXd& f) { run.emplace_back(t, f); }
  void finish_direction() {
    if (run.size() >= 3) {
      Extrapolant e = richardson_limit(run, 1);
      if (!best || e.error_indicator < best->error_indicator) best = e;
    }
    run.clear();
  }
};

inline std::optional<PointRecovery> extend_analytic(const LegendreData& data,
                                                    const Eigen::VectorXd& x,
                                                    const RecoverOptions& opts,
                                                    std::uint64_t point_seed) {
  const int n = data.n;
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  std::mt19937_64 rng(mix_seed(point_seed, 0xd1d5ull));
  for (int i = 0; i < 2 * n; ++i) dirs.push_back(random_unit(n, rng));

  std::vector<double> steps = opts.extension_steps;
  if (steps.empty()) {
    const double h0 = 1e-2 * data.domain_scale();
    steps = {h0, h0 / 2.0, h0 / 4.0, h0 / 8.0};
  }
  std::sort(steps.begin(), steps.end(), std::greater<double>());

  RecoverOptions probe_opts = opts;
  probe_opts.allow_extension = false;
  ProbeAccumulator acc;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const Eigen::VectorXd p = x + steps[s] * dirs[d];
      bool inside = true;
      for (int i = 0; i < n; ++i)
        if (p[i] < data.lo[i] || p[i] > data.hi[i]) inside = false;
      if (!inside) {
        acc.fail();
        continue;
      }
      try {
        PointRecovery r = recover_direct_analytic(
            data, p, probe_opts, mix_seed(point_seed, 0xabc0ull + d * 64 + s));
        acc.succeed(steps[s], r.f);
      } catch (const Error&) {
        acc.fail();
      }
    }
    acc.finish_direction();
  }
  if (!acc.best) return std::nullopt;
  PointRecovery out;
  out.status = PointStatus::ExtendedByLimit;
  out.f = acc.best->value;
  out.extension_indicator = acc.best->error_indicator;
  return out;
}

inline std::optional<PointRecovery> extend_sampled(const LegendreData& data,
                                                   std::span<const int> node,
                                                   const RecoverOptions& opts,
                                                   std::uint64_t point_seed) {
  const int n = data.n;
  static constexpr int kOffsets[] = {8, 4, 2, 1};  // descending keeps ratio 2
  ProbeAccumulator acc;
  std::vector<int> probe(node.begin(), node.end());
  for (int axis = 0; axis < n; ++axis) {
    const int count = static_cast<int>(data.nu_grid.axes[static_cast<std::size_t>(axis)].size());
    const double h = data.nu_grid.spacing(axis);
    for (int sign = -1; sign <= 1; sign += 2) {
      for (std::size_t s = 0; s < std::size(kOffsets); ++s) {
        const int k = node[static_cast<std::size_t>(axis)] + sign * kOffsets[s];
        if (k < 0 || k >= count) {
          acc.fail();
          continue;
        }
        probe[static_cast<std::size_t>(axis)] = k;
        try {
          PointRecovery r = recover_direct_sampled(
              data, probe, opts,
              mix_seed(point_seed, 0xabc0ull + static_cast<std::uint64_t>(axis * 8 + sign + s)));
          acc.succeed(kOffsets[s] * h, r.f);
        } catch (const Error&) {
          acc.fail();
        }
      }
      acc.finish_direction();
    }
    probe[static_cast<std::size_t>(axis)] = node[static_cast<std::size_t>(axis)];
  }
  if (!acc.best) return std::nullopt;
  PointRecovery out;
  out.status = PointStatus::ExtendedByLimit;
  out.f = acc.best->value;
  out.extension_indicator = acc.best->error_indicator;
  return out;
}

inline PointRecovery recover_node_detail(const LegendreData& data,
                                         std::span<const int> node,
                                         const RecoverOptions& opts,
                                         std::uint64_t point_seed) {
  try {
    return recover_direct_sampled(data, node, opts, point_seed);
  } catch (const Error&) {
    if (opts.allow_extension)
      if (auto ext = extend_sampled(data, node, opts, point_seed)) return *ext;
  }
  PointRecovery out;
  out.status = PointStatus::Unresolved;
  out.f = Eigen::VectorXd::Constant(data.n + 1, std::numeric_limits<double>::quiet_NaN());
  return out;
}

inline PointRecovery recover_point_detail(const LegendreData& data,
                                          const Eigen::VectorXd& x,
                                          const RecoverOptions& opts,
                                          std::uint64_t point_seed) {
  if (!data.analytic_mode()) {
    // Snap to the nearest grid node.
    std::vector<int> node(static_cast<std::size_t>(data.n));
    for (int i = 0; i < data.n; ++i) {
      const auto& ax = data.nu_grid.axes[static_cast<std::size_t>(i)];
      const double h = data.nu_grid.spacing(i);
      int k = static_cast<int>(std::lround((x[i] - ax.front()) / h));
      node[static_cast<std::size_t>(i)] =
          std::clamp(k, 0, static_cast<int>(ax.size()) - 1);
    }
    return recover_node_detail(data, node, opts, point_seed);
  }
  try {
    return recover_direct_analytic(data, x, opts, point_seed);
  } catch (const Error&) {
    if (opts.allow_extension)
      if (auto ext = extend_analytic(data, x, opts, point_seed)) return *ext;
  }
  PointRecovery out;
  out.status = PointStatus::Unresolved;
  out.f = Eigen::VectorXd::Constant(data.n + 1, std::numeric_limits<double>::quiet_NaN());
  return out;
}

}  // namespace detail

// Extracted spherical angles of the normal field at x (principal branch).
inline AngleVector angle_field(const LegendreData& data, const Eigen::VectorXd& x,
                               double pole_eps = kPoleEpsilon) {
  if (!data.analytic_mode())
    throw ConfigError("angle_field: analytic data required");
  return extract_angles(data.nu_map(x), pole_eps);
}

// Unique solution b of dtheta * b = da, where dtheta(i, j) = d theta_j/dx_i.
// Refuses rank deficient systems: those points lie on the normal field's
// singular set and must be resolved by limit extension instead.
inline Eigen::VectorXd solve_coefficients(const Eigen::VectorXd& da,
                                          const Eigen::MatrixXd& dtheta,
                                          double det_eps = kDetEpsilon) {
  if (dtheta.rows() != dtheta.cols() || dtheta.rows() != da.size())
    throw ConfigError("solve_coefficients: shape mismatch");
  double row_norm_product = 1.0;
  for (int i = 0; i < dtheta.rows(); ++i) row_norm_product *= dtheta.row(i).norm();
  const double det = dtheta.determinant();
  if (!(std::abs(det) > det_eps * row_norm_product))
    throw SingularChart("solve_coefficients: matrix is rank deficient");
  return dtheta.fullPivLu().solve(da);
}

// Full per point recovery (rotations and limit extension included).
// Throws UnresolvedPoint when no regular approach direction exists.
inline Eigen::VectorXd recover_point(const LegendreData& data, const Eigen::VectorXd& x,
                                     const RecoverOptions& opts = {}) {
  PointRecovery r = detail::recover_point_detail(data, x, opts, opts.seed);
  if (r.status == PointStatus::Unresolved)
    throw UnresolvedPoint("recover_point: no regular approach direction");
  return r.f;
}

// Limit extension at a (typically rank deficient) point: probe nearby points
// along axis and seeded random directions, recover where regular, and
// extrapolate the values to step zero. Throws UnresolvedPoint when every
// probe direction stays rank deficient.
inline Eigen::VectorXd extend_at_singular(const LegendreData& data,
                                          const Eigen::VectorXd& x,
                                          const RecoverOptions& opts = {}) {
  if (!data.analytic_mode())
    throw ConfigError("extend_at_singular: analytic data required");
  auto ext = detail::extend_analytic(data, x, opts, opts.seed);
  if (!ext) throw UnresolvedPoint("extend_at_singular: all probes degenerate");
  return ext->f;
}

// Recovery through an explicitly rotated chart: recover the data with the
// normal field replaced by R * nu, then rotate the result back.
inline Eigen::VectorXd recover_with_rotation(const LegendreData& data,
                                             const Eigen::VectorXd& x,
                                             const Eigen::MatrixXd& R,
                                             const RecoverOptions& opts = {}) {
  const int m = data.n + 1;
  if (R.rows() != m || R.cols() != m ||
      (R * R.transpose() - Eigen::MatrixXd::Identity(m, m)).norm() > 1e-10 ||
      R.determinant() < 0.0)
    throw ConfigError("recover_with_rotation: R must be a rotation");
  if (data.analytic_mode()) {
    const DifferentiableMap base = data.nu_map;
    auto rotated = [base, R, m](auto x_in, auto out) {
      using T = std::remove_cv_t<typename decltype(out)::value_type>;
      std::vector<T> w(static_cast<std::size_t>(m));
      base.eval(x_in, std::span<T>(w));
      for (int r = 0; r < m; ++r) {
        T acc = T(0);
        for (int c = 0; c < m; ++c) acc += R(r, c) * w[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(r)] = acc;
      }
    };
    // The base map may lack second derivative support, so wire only the
    // levels recovery needs.
    DifferentiableMap::RealFn real = [rotated](std::span<const double> xi, std::span<double> yo) {
      rotated(xi, yo);
    };
    DifferentiableMap::Dual1Fn dual1 = [rotated](std::span<const Dual1> xi, std::span<Dual1> yo) {
      rotated(xi, yo);
    };
    LegendreData rotated_data = LegendreData::analytic(
        DifferentiableMap(data.n, m, real, dual1, {}), data.a_map, data.lo, data.hi);
    return R.transpose() * recover_point(rotated_data, x, opts);
  }
  LegendreData rotated_data = data;
  const std::size_t count = data.nu_grid.node_count();
  for (std::size_t node = 0; node < count; ++node)
    rotated_data.nu_grid.set_value(node, R * data.nu_grid.value_at(node));
  return R.transpose() * recover_point(rotated_data, x, opts);
}

namespace detail {

inline void finalize_grid_diagnostics(const LegendreData& data, RecoveredMap& out) {
  const int n = data.n;
  const std::size_t count = out.f.node_count();
  double sum_sq = 0.0;
  std::size_t resolved = 0;
  for (std::size_t node = 0; node < count; ++node) {
    if (out.status[node] == PointStatus::Unresolved) continue;
    const double r = out.height_residual[node];
    if (!std::isfinite(r)) continue;
    ++resolved;
    out.max_height_residual = std::max(out.max_height_residual, r);
    sum_sq += r * r;
  }
  out.rms_height_residual = resolved > 0 ? std::sqrt(sum_sq / static_cast<double>(resolved)) : 0.0;

  // Tangency: central difference directional derivatives of the recovered
  // map dotted with the normal, at nodes whose axis neighbors all resolved.
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::vector<int> shifted(static_cast<std::size_t>(n));
  for (std::size_t node = 0; node < count; ++node) {
    if (out.status[node] == PointStatus::Unresolved) continue;
    out.f.unflatten(node, idx);
    bool interior = true;
    for (int axis = 0; axis < n && interior; ++axis) {
      const int k = idx[static_cast<std::size_t>(axis)];
      const int cnt = static_cast<int>(out.f.axes[static_cast<std::size_t>(axis)].size());
      if (k == 0 || k + 1 == cnt) interior = false;
    }
    if (!interior) continue;
    Eigen::VectorXd nu_here;
    if (data.analytic_mode()) {
      Eigen::VectorXd x = out.f.point_at(idx);
      nu_here = data.nu_map(x);
    } else {
      nu_here = data.nu_grid.value_at(node);
    }
    for (int axis = 0; axis < n; ++axis) {
      shifted.assign(idx.begin(), idx.end());
      shifted[static_cast<std::size_t>(axis)] = idx[static_cast<std::size_t>(axis)] + 1;
      const std::size_t up = out.f.flat_index(shifted);
      shifted[static_cast<std::size_t>(axis)] = idx[static_cast<std::size_t>(axis)] - 1;
      const std::size_t dn = out.f.flat_index(shifted);
      if (out.status[up] == PointStatus::Unresolved ||
          out.status[dn] == PointStatus::Unresolved)
        continue;
      const double h = out.f.spacing(axis);
      Eigen::VectorXd deriv = (out.f.value_at(up) - out.f.value_at(dn)) / (2.0 * h);
      const double tangency = std::abs(deriv.dot(nu_here));
      if (std::isfinite(tangency))
        out.max_tangency_residual = std::max(out.max_tangency_residual, tangency);
    }
  }
}

}  // namespace detail

// Apply per point recovery over a grid. In sampled mode the data's own grid
// is used; in analytic mode pass the evaluation axes. Node work is
// distributed over threads in contiguous chunks; every node derives its
// randomness from (seed, node index), so results do not depend on the
// thread count.
inline RecoveredMap recover_grid(const LegendreData& data,
                                 std::vector<std::vector<double>> axes = {},
                                 const RecoverOptions& opts = {}) {
  if (data.analytic_mode() && axes.empty())
    throw ConfigError("recover_grid: analytic data needs evaluation axes");
  if (!data.analytic_mode()) axes = data.nu_grid.axes;

  RecoveredMap out;
  out.f.axes = axes;
  out.f.values_per_node = data.n + 1;
  out.b.axes = axes;
  out.b.values_per_node = data.n;
  const std::size_t count = out.f.node_count();
  out.f.values.assign(count * static_cast<std::size_t>(data.n + 1),
                      std::numeric_limits<double>::quiet_NaN());
  out.b.values.assign(count * static_cast<std::size_t>(data.n),
                      std::numeric_limits<double>::quiet_NaN());
  out.status.assign(count, PointStatus::Unresolved);
  out.chart_pole.assign(count, 0);
  out.height_residual.assign(count, std::numeric_limits<double>::quiet_NaN());

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<int> idx(static_cast<std::size_t>(data.n));
    for (std::size_t node = begin; node < end; ++node) {
      out.f.unflatten(node, idx);
      const std::uint64_t node_seed = detail::mix_seed(opts.seed, node);
      PointRecovery r;
      double a_here = std::numeric_limits<double>::quiet_NaN();
      Eigen::VectorXd nu_here;
      if (data.analytic_mode()) {
        const Eigen::VectorXd x = out.f.point_at(idx);
        r = detail::recover_point_detail(data, x, opts, node_seed);
        try {
          nu_here = data.nu_map(x);
          a_here = data.a_map(x)[0];
        } catch (const Error&) {
        }
      } else {
        r = detail::recover_node_detail(data, idx, opts, node_seed);
        nu_here = data.nu_grid.value_at(node);
        a_here = data.a_grid.value_at(node)[0];
      }
      out.status[node] = r.status;
      out.chart_pole[node] = r.chart_pole ? 1 : 0;
      if (r.status != PointStatus::Unresolved) {
        out.f.set_value(node, r.f);
        if (nu_here.size() > 0 && std::isfinite(a_here))
          out.height_residual[node] = std::abs(r.f.dot(nu_here) - a_here);
      }
      if (r.status == PointStatus::Regular) out.b.set_value(node, r.b);
    }
  };

  unsigned workers = std::thread::hardware_concurrency();
  if (workers <= 1 || count < 256) {
    work(0, count);
  } else {
    workers = std::min<unsigned>(workers, 8);
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t node = 0; node < count; ++node) {
    switch (out.status[node]) {
      case PointStatus::Regular: ++out.regular_count; break;
      case PointStatus::ExtendedByLimit: ++out.extended_count; break;
      case PointStatus::Unresolved: ++out.unresolved_count; break;
    }
  }
  detail::finalize_grid_diagnostics(data, out);
  return out;
}

// Per point recovery with full diagnostics (status, coefficients, chart
// rotation bookkeeping); never throws for resolvable failure modes.
inline PointRecovery recover_point_diagnostics(const LegendreData& data,
                                                       const Eigen::VectorXd& x,
                                                       const RecoverOptions& opts = {}) {
  return detail::recover_point_detail(data, x, opts, opts.seed);
}

}  // namespace frontal
