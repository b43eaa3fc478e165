#pragma once

// Registry of worked examples: parametrizations, their closed-form normal
// fields and height functions, coefficient formulas where known in closed
// form, regular-set predicates, and stage-indexed perturbation families.
// These entries are the golden oracles for the recovery pipeline and the
// vocabulary of the command line tools.
//
// Closed forms are stored as written, with one correction found by solving
// the defining linear system exactly: the second cross-cap coefficient is
// (x^2 - 2y^4)/sqrt(x^2 + 4y^4 + 4y^2). A superficially similar variant with
// denominator sqrt(x^2 + 4y^4) (the norm factor of the second frame vector)
// does not satisfy da = dtheta * b; the unit tests pin both facts.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "frontal/errors.hpp"
#include "frontal/map.hpp"
#include "frontal/recovery.hpp"
#include "frontal/sphere_frame.hpp"

namespace frontal {

// Half-width of the exclusion tube around a singular set: points whose
// defining-function magnitude falls below this count as on the set.
inline constexpr double kSingularTube = 1e-6;

struct GalleryEntry {
  std::string name;
  int n = 0;
  bool has_family = false;
  std::vector<int> default_stages;  // {1, 2, 4, 8, 16} for family entries
  Eigen::VectorXd lo, hi;           // default domain box

  DifferentiableMap f;                           // target map (the unperturbed limit)
  std::function<DifferentiableMap(int)> family;  // stage maps f_k, family entries only

  // Closed-form Legendre data. The stage argument is ignored by entries
  // without a family.
  std::function<DifferentiableMap(int)> nu_closed;
  std::function<DifferentiableMap(int)> a_closed;

  bool has_printed_b = false;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)> b_closed;

  // Magnitude of a defining function for the singular set of the map
  // (respectively of its normal field); +infinity when the set is empty.
  // For family entries both sets are stage independent.
  std::function<double(const Eigen::VectorXd&)> map_singular_residual;
  std::function<double(const Eigen::VectorXd&)> gauss_singular_residual;

  // Membership in the regular set of the (stage) map, with tube semantics.
  std::function<bool(const Eigen::VectorXd&)> regular_set_predicate;
};

namespace detail {

inline std::function<double(const Eigen::VectorXd&)> no_singular_set() {
  return [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };
}

inline void attach_predicate(GalleryEntry& e) {
  auto residual = e.map_singular_residual;
  e.regular_set_predicate = [residual](const Eigen::VectorXd& x) {
    return residual(x) > kSingularTube;
  };
}

inline Eigen::VectorXd box(double v, int n) {
  return Eigen::VectorXd::Constant(n, v);
}

// ---- curve whose tangent-line family is recovered in closed form ----
// f(x) = (x, x^3)
inline GalleryEntry make_intro_cubic_graph() {
  GalleryEntry e;
  e.name = "intro_cubic_graph";
  e.n = 1;
  e.lo = box(-2.0, 1);
  e.hi = box(2.0, 1);
  e.f = DifferentiableMap(1, 2, [](auto x, auto out) {
    auto X = x[0];
    out[0] = X;
    out[1] = X * X * X;
  });
  e.nu_closed = [](int) {
    return DifferentiableMap(1, 2, [](auto x, auto out) {
      auto X = x[0];
      auto X2 = X * X;
      auto s = sqrt(1.0 + 9.0 * X2 * X2);
      out[0] = -3.0 * X2 / s;
      out[1] = 1.0 / s;
    });
  };
  e.a_closed = [](int) {
    return DifferentiableMap(1, 1, [](auto x, auto out) {
      auto X = x[0];
      auto X2 = X * X;
      out[0] = -2.0 * X2 * X / sqrt(1.0 + 9.0 * X2 * X2);
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& x, int) {
    const double X = x[0];
    Eigen::VectorXd b(1);
    b[0] = (-X - 3.0 * X * X * X * X * X) / std::sqrt(1.0 + 9.0 * X * X * X * X);
    return b;
  };
  e.map_singular_residual = no_singular_set();
  // The normal field's derivative vanishes only at the inflection point.
  e.gauss_singular_residual = [](const Eigen::VectorXd& x) { return std::abs(x[0]); };
  attach_predicate(e);
  return e;
}

// ---- cusp: f(x) = (x^2, x^3) ----
// The map is singular at the origin, yet its normal field is regular on all
// of R, so recovery works everywhere; no coefficient formula accompanies it.
inline GalleryEntry make_cusp() {
  GalleryEntry e;
  e.name = "cusp";
  e.n = 1;
  e.lo = box(-2.0, 1);
  e.hi = box(2.0, 1);
  e.f = DifferentiableMap(1, 2, [](auto x, auto out) {
    auto X = x[0];
    out[0] = X * X;
    out[1] = X * X * X;
  });
  e.nu_closed = [](int) {
    return DifferentiableMap(1, 2, [](auto x, auto out) {
      auto X = x[0];
      auto s = sqrt(9.0 * X * X + 4.0);
      out[0] = -3.0 * X / s;
      out[1] = 2.0 / s;
    });
  };
  e.a_closed = [](int) {
    return DifferentiableMap(1, 1, [](auto x, auto out) {
      auto X = x[0];
      out[0] = -X * X * X / sqrt(9.0 * X * X + 4.0);
    });
  };
  e.map_singular_residual = [](const Eigen::VectorXd& x) { return std::abs(x[0]); };
  e.gauss_singular_residual = no_singular_set();
  attach_predicate(e);
  return e;
}

// ---- constant mapping with its sphere family ----
// f == X0; stage k approaches it along spheres f_k = X0 + nu(x)/k, where nu
// is the spherical chart with angles equal to the coordinates.
inline GalleryEntry make_constant() {
  GalleryEntry e;
  e.name = "constant";
  e.n = 2;
  e.has_family = true;
  e.default_stages = {1, 2, 4, 8, 16};
  e.lo = box(-2.0, 2);
  e.hi = box(2.0, 2);
  const Eigen::Vector3d X0(0.5, -0.25, 0.75);
  e.f = DifferentiableMap(2, 3, [X0](auto, auto out) {
    out[0] = X0[0];
    out[1] = X0[1];
    out[2] = X0[2];
  });
  e.family = [X0](int stage) {
    const double k = stage;
    return DifferentiableMap(2, 3, [X0, k](auto x, auto out) {
      detail::nu_sphere_eval(x.data(), 2, out.data());
      for (int j = 0; j < 3; ++j)
        out[static_cast<std::size_t>(j)] = X0[j] + out[static_cast<std::size_t>(j)] / k;
    });
  };
  e.nu_closed = [](int) {
    return DifferentiableMap(2, 3, [](auto x, auto out) {
      detail::nu_sphere_eval(x.data(), 2, out.data());
    });
  };
  e.a_closed = [X0](int stage) {
    const double k = stage;
    return DifferentiableMap(2, 1, [X0, k](auto x, auto out) {
      using T = typename std::remove_cvref_t<decltype(out)>::value_type;
      T nu[3];
      detail::nu_sphere_eval(x.data(), 2, nu);
      out[0] = X0[0] * nu[0] + X0[1] * nu[1] + X0[2] * nu[2] + 1.0 / k;
    });
  };
  // The coefficients are the frame components of the center: b_j equals X0
  // dotted with the j-th (unnormalized) coordinate vector of the chart.
  // They do not depend on the stage.
  e.has_printed_b = true;
  e.b_closed = [X0](const Eigen::VectorXd& x, int) {
    Frame fr = frame(x);
    Eigen::VectorXd b(2);
    for (int j = 0; j < 2; ++j)
      b[j] = fr.rho[j] * X0.dot(fr.mu_hat[static_cast<std::size_t>(j)]);
    return b;
  };
  e.map_singular_residual = no_singular_set();  // every stage map is regular
  e.gauss_singular_residual = [](const Eigen::VectorXd& x) {
    // The chart degenerates where cos(x1) = 0.
    return std::abs(std::remainder(x[0] - M_PI / 2.0, M_PI));
  };
  attach_predicate(e);
  return e;
}

// ---- cuspidal cross-cap: f(x,y) = (x, y^2, xy^3) ----
inline GalleryEntry make_cuspidal_crosscap() {
  GalleryEntry e;
  e.name = "cuspidal_crosscap";
  e.n = 2;
  e.lo = box(-2.0, 2);
  e.hi = box(2.0, 2);
  e.f = DifferentiableMap(2, 3, [](auto x, auto out) {
    auto X = x[0];
    auto Y = x[1];
    out[0] = X;
    out[1] = Y * Y;
    out[2] = X * Y * Y * Y;
  });
  e.nu_closed = [](int) {
    return DifferentiableMap(2, 3, [](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y3 = Y * Y * Y;
      auto s = sqrt(9.0 * X * X * Y * Y + 4.0 * Y3 * Y3 + 4.0);
      out[0] = -2.0 * Y3 / s;
      out[1] = -3.0 * X * Y / s;
      out[2] = 2.0 / s;
    });
  };
  e.a_closed = [](int) {
    return DifferentiableMap(2, 1, [](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y3 = Y * Y * Y;
      out[0] = -3.0 * X * Y3 / sqrt(9.0 * X * X * Y * Y + 4.0 * Y3 * Y3 + 4.0);
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& p, int) {
    const double x = p[0], y = p[1];
    const double D = 9.0 * x * x * y * y + 4.0 * std::pow(y, 6) + 4.0;
    const double Q = 9.0 * x * x + 4.0 * y * y * y * y;
    Eigen::VectorXd b(2);
    b[0] = x * y * y * (9.0 * x * x * y * y + 4.0 * std::pow(y, 6) + 10.0) /
           (std::sqrt(Q) * std::sqrt(D));
    b[1] = (3.0 * x * x * y - 2.0 * std::pow(y, 5)) / std::sqrt(D);
    return b;
  };
  e.map_singular_residual = [](const Eigen::VectorXd& p) { return std::abs(p[1]); };
  e.gauss_singular_residual = e.map_singular_residual;
  attach_predicate(e);
  return e;
}

// ---- cross-cap: f(x,y) = (x, y^2, xy) ----
// Not a frontal at the origin (the normal field has no continuous limit
// there), but regular points are dense, so grid recovery still applies.
inline GalleryEntry make_crosscap() {
  GalleryEntry e;
  e.name = "crosscap";
  e.n = 2;
  e.lo = box(-2.0, 2);
  e.hi = box(2.0, 2);
  e.f = DifferentiableMap(2, 3, [](auto x, auto out) {
    auto X = x[0];
    auto Y = x[1];
    out[0] = X;
    out[1] = Y * Y;
    out[2] = X * Y;
  });
  e.nu_closed = [](int) {
    return DifferentiableMap(2, 3, [](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y2 = Y * Y;
      auto s = sqrt(X * X + 4.0 * Y2 * Y2 + 4.0 * Y2);
      out[0] = -2.0 * Y2 / s;
      out[1] = -X / s;
      out[2] = 2.0 * Y / s;
    });
  };
  e.a_closed = [](int) {
    return DifferentiableMap(2, 1, [](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y2 = Y * Y;
      out[0] = -X * Y2 / sqrt(X * X + 4.0 * Y2 * Y2 + 4.0 * Y2);
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& p, int) {
    const double x = p[0], y = p[1];
    const double D = x * x + 4.0 * y * y * y * y + 4.0 * y * y;
    const double Dm = x * x + 4.0 * y * y * y * y;
    Eigen::VectorXd b(2);
    b[0] = x * y * (x * x + 4.0 * y * y * y * y + 6.0 * y * y) /
           (std::sqrt(Dm) * std::sqrt(D));
    b[1] = (x * x - 2.0 * y * y * y * y) / std::sqrt(D);
    return b;
  };
  e.map_singular_residual = [](const Eigen::VectorXd& p) { return p.norm(); };
  // The map is singular only at the origin, but the normal field degenerates
  // along the whole line y = 0 (its x-derivative vanishes there), so the
  // angle system needs limit extension on that line.
  e.gauss_singular_residual = [](const Eigen::VectorXd& p) { return std::abs(p[1]); };
  attach_predicate(e);
  return e;
}

// ---- cuspidal edge with stage family f_n = (x, x^2/n + y^2, y^3) ----
inline GalleryEntry make_cuspidal_edge() {
  GalleryEntry e;
  e.name = "cuspidal_edge";
  e.n = 2;
  e.has_family = true;
  e.default_stages = {1, 2, 4, 8, 16};
  e.lo = box(-2.0, 2);
  e.hi = box(2.0, 2);
  e.f = DifferentiableMap(2, 3, [](auto x, auto out) {
    auto X = x[0];
    auto Y = x[1];
    out[0] = X;
    out[1] = Y * Y;
    out[2] = Y * Y * Y;
  });
  e.family = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 3, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      out[0] = X;
      out[1] = X * X / n + Y * Y;
      out[2] = Y * Y * Y;
    });
  };
  e.nu_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 3, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto s = sqrt(9.0 * n * n * Y * Y + 4.0 * n * n + 36.0 * X * X * Y * Y);
      out[0] = 6.0 * X * Y / s;
      out[1] = -3.0 * n * Y / s;
      out[2] = 2.0 * n / s;
    });
  };
  e.a_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 1, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      out[0] = Y * (3.0 * X * X - n * Y * Y) /
               sqrt(9.0 * n * n * Y * Y + 4.0 * n * n + 36.0 * X * X * Y * Y);
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& p, int stage) {
    const double n = stage;
    const double x = p[0], y = p[1];
    const double D = 9.0 * n * n * y * y + 4.0 * n * n + 36.0 * x * x * y * y;
    const double E = n * n + 4.0 * x * x;
    Eigen::VectorXd b(2);
    b[0] = (3.0 * n * n * y * y * y * y + 2.0 * n * n * y * y - 2.0 * n * x * x +
            12.0 * x * x * y * y * y * y) /
           (std::sqrt(E) * std::sqrt(D));
    b[1] = 3.0 * x * y * (n * n + 2.0 * n * y * y + 2.0 * x * x) / (n * std::sqrt(D));
    return b;
  };
  e.map_singular_residual = [](const Eigen::VectorXd& p) { return std::abs(p[1]); };
  e.gauss_singular_residual = e.map_singular_residual;
  attach_predicate(e);
  return e;
}

// ---- swallowtail with stage family f_n = (x, xy+2y^3, x^2/n + xy^2 + 3y^4) ----
inline GalleryEntry make_swallowtail() {
  GalleryEntry e;
  e.name = "swallowtail";
  e.n = 2;
  e.has_family = true;
  e.default_stages = {1, 2, 4, 8, 16};
  e.lo = box(-2.0, 2);
  e.hi = box(2.0, 2);
  e.f = DifferentiableMap(2, 3, [](auto x, auto out) {
    auto X = x[0];
    auto Y = x[1];
    out[0] = X;
    out[1] = X * Y + 2.0 * Y * Y * Y;
    out[2] = X * Y * Y + 3.0 * Y * Y * Y * Y;
  });
  e.family = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 3, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      out[0] = X;
      out[1] = X * Y + 2.0 * Y * Y * Y;
      out[2] = X * X / n + X * Y * Y + 3.0 * Y * Y * Y * Y;
    });
  };
  e.nu_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 3, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y2 = Y * Y;
      auto D2 = n * n * Y2 * Y2 + 4.0 * n * n * Y2 - 4.0 * n * X * Y2 + 4.0 * X * X;
      auto s = sqrt(D2 + n * n);
      out[0] = (n * Y2 - 2.0 * X) / s;
      out[1] = -2.0 * n * Y / s;
      out[2] = n / s;
    });
  };
  e.a_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(2, 1, [n](auto x, auto out) {
      auto X = x[0];
      auto Y = x[1];
      auto Y2 = Y * Y;
      auto D2 = n * n * Y2 * Y2 + 4.0 * n * n * Y2 - 4.0 * n * X * Y2 + 4.0 * X * X;
      out[0] = -(n * Y2 * Y2 + X * X) / sqrt(D2 + n * n);
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& p, int stage) {
    const double n = stage;
    const double x = p[0], y = p[1];
    const double y2 = y * y, y4 = y2 * y2, y6 = y4 * y2;
    const double D2 = n * n * y4 + 4.0 * n * n * y2 - 4.0 * n * x * y2 + 4.0 * x * x;
    const double D = D2 + n * n;
    Eigen::VectorXd b(2);
    b[0] = (n * n * n * y2 * (x * y4 + 4.0 * x * y2 + x + 3.0 * y6 + 12.0 * y4 + 4.0 * y2) +
            n * n * x * (x * (-3.0 * y4 + 4.0 * y2 + 2.0) - 12.0 * y6) +
            12.0 * n * x * x * y4 + 4.0 * x * x * x * x) /
           (n * std::sqrt(D2) * std::sqrt(D));
    b[1] = y * (n * x * y2 + 2.0 * n * x + 2.0 * n * y4 - 2.0 * x * x - 4.0 * x * y2) /
           std::sqrt(D);
    return b;
  };
  e.map_singular_residual = [](const Eigen::VectorXd& p) {
    return std::abs(p[0] + 6.0 * p[1] * p[1]);
  };
  e.gauss_singular_residual = e.map_singular_residual;
  attach_predicate(e);
  return e;
}

// ---- D4+ singularity with stage family f_n = f + (u^2/n) e_4 ----
// f(u,v,w) = (u, vw, 2uv + 3v^2 + w^2, uv^2 + 2v^3 + 2vw^2)
inline GalleryEntry make_d4plus() {
  GalleryEntry e;
  e.name = "d4plus";
  e.n = 3;
  e.has_family = true;
  e.default_stages = {1, 2, 4, 8, 16};
  e.lo = box(-2.0, 3);
  e.hi = box(2.0, 3);
  e.f = DifferentiableMap(3, 4, [](auto x, auto out) {
    auto U = x[0];
    auto V = x[1];
    auto W = x[2];
    out[0] = U;
    out[1] = V * W;
    out[2] = 2.0 * U * V + 3.0 * V * V + W * W;
    out[3] = U * V * V + 2.0 * V * V * V + 2.0 * V * W * W;
  });
  e.family = [](int stage) {
    const double n = stage;
    return DifferentiableMap(3, 4, [n](auto x, auto out) {
      auto U = x[0];
      auto V = x[1];
      auto W = x[2];
      out[0] = U;
      out[1] = V * W;
      out[2] = 2.0 * U * V + 3.0 * V * V + W * W;
      out[3] = U * V * V + 2.0 * V * V * V + 2.0 * V * W * W + U * U / n;
    });
  };
  e.nu_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(3, 4, [n](auto x, auto out) {
      auto U = x[0];
      auto V = x[1];
      auto W = x[2];
      auto V2 = V * V;
      auto D3 = n * n * V2 * V2 + 4.0 * n * n * W * W - 4.0 * n * U * V2 + 4.0 * U * U;
      auto D2 = D3 + n * n * V2;
      auto s = sqrt(D2 + n * n);
      out[0] = (n * V2 - 2.0 * U) / s;
      out[1] = -2.0 * n * W / s;
      out[2] = -n * V / s;
      out[3] = n / s;
    });
  };
  e.a_closed = [](int stage) {
    const double n = stage;
    return DifferentiableMap(3, 1, [n](auto x, auto out) {
      auto U = x[0];
      auto V = x[1];
      auto W = x[2];
      auto V2 = V * V;
      auto f1 = V * W;
      auto f2 = 2.0 * U * V + 3.0 * V2 + W * W;
      auto f3 = U * V2 + 2.0 * V2 * V + 2.0 * V * W * W + U * U / n;
      auto D3 = n * n * V2 * V2 + 4.0 * n * n * W * W - 4.0 * n * U * V2 + 4.0 * U * U;
      auto D2 = D3 + n * n * V2;
      auto s = sqrt(D2 + n * n);
      out[0] = (U * (n * V2 - 2.0 * U) + f1 * (-2.0 * n * W) + f2 * (-n * V) + f3 * n) / s;
    });
  };
  e.has_printed_b = true;
  e.b_closed = [](const Eigen::VectorXd& p, int stage) {
    const double n = stage;
    const double u = p[0], v = p[1], w = p[2];
    const double v2 = v * v, v3 = v2 * v, v4 = v2 * v2, v5 = v4 * v, v6 = v4 * v2;
    const double w2 = w * w, w4 = w2 * w2;
    const double D3 = n * n * v4 + 4.0 * n * n * w2 - 4.0 * n * u * v2 + 4.0 * u * u;
    const double D2 = D3 + n * n * v2;
    const double D = D2 + n * n;
    Eigen::VectorXd b(3);
    b[0] = (n * n * n * v *
                (u * (v5 + v3 + 4.0 * v * w2 + v) + 2.0 * v6 + 2.0 * v4 * (w2 + 1.0) +
                 v2 * (10.0 * w2 + 3.0) + w2 * (8.0 * w2 + 3.0)) +
            n * n * u * (u * (-3.0 * v4 + v2 + 4.0 * w2 + 2.0) - 8.0 * v3 * (v2 + w2)) +
            8.0 * n * u * u * v * (v2 + w2) + 4.0 * u * u * u * u) /
           (n * std::sqrt(D2) * std::sqrt(D));
    b[1] = (n * n * (u * (2.0 * v5 + v3 + 8.0 * v * w2) + 3.0 * v6 + v4 * w2 +
                     10.0 * v2 * w2 + 4.0 * w4) -
            2.0 * n * u * v * (4.0 * u * v2 + u + 6.0 * v3 + 2.0 * v * w2) +
            4.0 * u * u * (2.0 * u * v + 3.0 * v2 + w2)) /
           (std::sqrt(D3) * std::sqrt(D));
    b[2] = w * (n * (2.0 * u + v3) - 2.0 * u * v) / std::sqrt(D);
    return b;
  };
  e.map_singular_residual = [](const Eigen::VectorXd& p) {
    return std::abs(p[2] * p[2] - p[0] * p[1] - 3.0 * p[1] * p[1]);
  };
  e.gauss_singular_residual = e.map_singular_residual;
  attach_predicate(e);
  return e;
}

inline const std::vector<GalleryEntry>& registry() {
  static const std::vector<GalleryEntry> entries = [] {
    std::vector<GalleryEntry> v;
    v.push_back(make_constant());
    v.push_back(make_cuspidal_crosscap());
    v.push_back(make_crosscap());
    v.push_back(make_cuspidal_edge());
    v.push_back(make_swallowtail());
    v.push_back(make_d4plus());
    v.push_back(make_intro_cubic_graph());
    v.push_back(make_cusp());
    return v;
  }();
  return entries;
}

inline int resolve_stage(const GalleryEntry& e, std::optional<int> stage) {
  if (e.has_family) {
    if (!stage) throw StageRequired(e.name + ": stage required");
    if (*stage < 1) throw ConfigError(e.name + ": stage must be >= 1");
    return *stage;
  }
  if (stage) throw StageNotApplicable(e.name + ": entry has no stage family");
  return 0;
}

}  // namespace detail

inline const GalleryEntry& lookup(const std::string& name) {
  for (const GalleryEntry& e : detail::registry())
    if (e.name == name) return e;
  throw UnknownExample(name);
}

inline std::vector<std::string> gallery_names() {
  std::vector<std::string> names;
  for (const GalleryEntry& e : detail::registry()) names.push_back(e.name);
  return names;
}

// The map recovery should reproduce: the stage map for family entries, the
// entry's own map otherwise.
inline DifferentiableMap target_map(const GalleryEntry& entry,
                                    std::optional<int> stage = std::nullopt) {
  const int s = detail::resolve_stage(entry, stage);
  return entry.has_family ? entry.family(s) : entry.f;
}

// Closed-form Legendre data of the entry (stage map for family entries).
inline LegendreData legendre_data_of(const GalleryEntry& entry,
                                     std::optional<int> stage = std::nullopt) {
  const int s = detail::resolve_stage(entry, stage);
  return LegendreData::analytic(entry.nu_closed(s), entry.a_closed(s), entry.lo, entry.hi);
}

// Closed-form coefficient vector at x.
inline Eigen::VectorXd oracle_b(const GalleryEntry& entry, std::optional<int> stage,
                                const Eigen::VectorXd& x) {
  if (!entry.has_printed_b)
    throw NoPrintedCoefficients(entry.name + ": no coefficient formulas");
  const int s = detail::resolve_stage(entry, stage);
  return entry.b_closed(x, s);
}

}  // namespace frontal
