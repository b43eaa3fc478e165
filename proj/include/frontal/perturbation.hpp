#pragma once

// Perturbation constructions and the double limit recovery: a stage indexed
// family of Legendre data is recovered stage by stage (falling back to limit
// extension where a stage is rank deficient at the point) and the stage
// values are extrapolated in the reciprocal stage index.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "frontal/diffops.hpp"
#include "frontal/errors.hpp"
#include "frontal/map.hpp"
#include "frontal/recovery.hpp"

namespace frontal {

enum class PerturbKind { Linear, Quadratic };

// Component j gains the linear term sum_i C(j, i) * x_i.
inline DifferentiableMap linear_perturb(const DifferentiableMap& f,
                                        const Eigen::MatrixXd& C) {
  const int n = f.dimension_in();
  const int m = f.dimension_out();
  if (C.rows() != m || C.cols() != n)
    throw ConfigError("linear_perturb: C must be (n+1) x n");
  auto kernel = [f, C, n, m](auto x, auto out) {
    using T = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
    f.eval(x, out);
    for (int j = 0; j < m; ++j) {
      T acc(0.0);
      for (int i = 0; i < n; ++i) acc = acc + C(j, i) * x[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j)] + acc;
    }
  };
  return DifferentiableMap(n, m, kernel);
}

// The last target component gains (1/2) sum_i c_i (F_i(x) - F_i(x0))^2 where
// F collects the first n target components; every other component is carried
// through unchanged, exactly.
inline DifferentiableMap quadratic_perturb(const DifferentiableMap& f,
                                           const Eigen::VectorXd& c,
                                           const Eigen::VectorXd& x0) {
  const int n = f.dimension_in();
  const int m = f.dimension_out();
  if (c.size() != n || x0.size() != n)
    throw ConfigError("quadratic_perturb: c and x0 must have n components");
  // F(x0) is a fixed constant of the construction.
  Eigen::VectorXd f0 = f(x0);
  auto kernel = [f, c, f0, n, m](auto x, auto out) {
    using T = std::remove_cv_t<typename std::remove_cvref_t<decltype(out)>::element_type>;
    f.eval(x, out);
    T acc(0.0);
    for (int i = 0; i < n; ++i) {
      T dev = out[static_cast<std::size_t>(i)] - f0[i];
      acc = acc + c[i] * dev * dev;
    }
    out[static_cast<std::size_t>(m - 1)] = out[static_cast<std::size_t>(m - 1)] + 0.5 * acc;
  };
  return DifferentiableMap(n, m, kernel);
}

// Default decay factor: s_stage = 1 / (stage^2 (1 + |base|)). Then the
// scaled constants satisfy |base * s_stage|^2 < 1/stage^2 strictly, which is
// the smallness bound both perturbation kinds require.
inline std::function<double(int)> default_decay(double base_norm) {
  const double scale = 1.0 + base_norm;
  return [scale](int stage) {
    if (stage < 1) throw ConfigError("schedule: stage must be >= 1");
    return 1.0 / (static_cast<double>(stage) * static_cast<double>(stage) * scale);
  };
}

// Stage schedule for perturbation constants: stage -> base * s_stage. The
// mode selects which construction the constants feed; both use the same
// squared-sum bound, so the decay factor is shared.
inline std::function<Eigen::MatrixXd(int)> make_schedule(const Eigen::MatrixXd& base,
                                                         PerturbKind mode) {
  (void)mode;
  if (base.norm() == 0.0) throw ConfigError("make_schedule: base must be non zero");
  auto decay = default_decay(base.norm());
  Eigen::MatrixXd b = base;
  return [b, decay](int stage) { return Eigen::MatrixXd(b * decay(stage)); };
}

inline std::function<Eigen::VectorXd(int)> make_schedule(const Eigen::VectorXd& base,
                                                         PerturbKind mode = PerturbKind::Quadratic) {
  auto m = make_schedule(Eigen::MatrixXd(base), mode);
  return [m](int stage) { return Eigen::VectorXd(m(stage)); };
}

struct PerturbationSpec {
  PerturbKind kind = PerturbKind::Linear;
  Eigen::MatrixXd C;   // (n+1) x n constants, linear kind
  Eigen::VectorXd c;   // n constants, quadratic kind
  Eigen::VectorXd x0;  // quadratic base point
  std::function<double(int)> schedule;  // stage -> scale factor on the constants

  static PerturbationSpec linear(Eigen::MatrixXd C_) {
    PerturbationSpec s;
    s.kind = PerturbKind::Linear;
    s.schedule = default_decay(C_.norm());
    s.C = std::move(C_);
    return s;
  }
  static PerturbationSpec quadratic(Eigen::VectorXd c_, Eigen::VectorXd x0_) {
    PerturbationSpec s;
    s.kind = PerturbKind::Quadratic;
    s.schedule = default_decay(c_.norm());
    s.c = std::move(c_);
    s.x0 = std::move(x0_);
    return s;
  }
};

// The stage map of a scheduled perturbation.
inline DifferentiableMap apply_stage(const DifferentiableMap& f,
                                     const PerturbationSpec& spec, int stage) {
  if (!spec.schedule) throw ConfigError("apply_stage: spec has no schedule");
  const double s = spec.schedule(stage);
  if (spec.kind == PerturbKind::Linear) return linear_perturb(f, Eigen::MatrixXd(spec.C * s));
  return quadratic_perturb(f, Eigen::VectorXd(spec.c * s), spec.x0);
}

struct StageResult {
  int stage = 0;
  PointStatus status = PointStatus::Unresolved;
  Eigen::VectorXd value;
  double inner_indicator = std::numeric_limits<double>::quiet_NaN();
};

struct SequenceRecovery {
  std::vector<StageResult> stages;
  Eigen::VectorXd outer;
  double outer_indicator = std::numeric_limits<double>::quiet_NaN();
  int successful = 0;
};

// Double limit: recover the point from each stage's data (the limit
// extension, probing along the inner step schedule 2^-4 .. 2^-10, handles
// stages that are rank deficient at x itself), then extrapolate the stage
// values in 1/stage to stage = infinity. Failed stages are recorded; the
// outer extrapolation needs at least 3 successful ones.
inline SequenceRecovery limit_recover(const std::function<LegendreData(int)>& family,
                                      const std::vector<int>& stages,
                                      const Eigen::VectorXd& x,
                                      const RecoverOptions& base_opts = {}) {
  if (stages.size() < 3)
    throw InsufficientSamples("limit_recover: need at least 3 stages");
  RecoverOptions opts = base_opts;
  if (opts.extension_steps.empty()) {
    opts.extension_steps.reserve(7);
    for (int j = 4; j <= 10; ++j) opts.extension_steps.push_back(std::pow(2.0, -j));
  }
  SequenceRecovery seq;
  std::vector<std::pair<double, Eigen::VectorXd>> samples;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const int stage = stages[k];
    StageResult res;
    res.stage = stage;
    try {
      LegendreData data = family(stage);
      PointRecovery r = detail::recover_point_detail(
          data, x, opts, detail::mix_seed(opts.seed, static_cast<std::uint64_t>(stage)));
      res.status = r.status;
      if (r.status != PointStatus::Unresolved) {
        res.value = r.f;
        res.inner_indicator =
            r.status == PointStatus::ExtendedByLimit ? r.extension_indicator : 0.0;
        samples.emplace_back(1.0 / static_cast<double>(stage), r.f);
        ++seq.successful;
      }
    } catch (const Error&) {
      res.status = PointStatus::Unresolved;
    }
    seq.stages.push_back(std::move(res));
  }
  if (seq.successful < 3)
    throw InsufficientSamples("limit_recover: fewer than 3 stages succeeded");
  Extrapolant outer = richardson_limit(std::move(samples), 1);
  seq.outer = outer.value;
  seq.outer_indicator = outer.error_indicator;
  return seq;
}

}  // namespace frontal
