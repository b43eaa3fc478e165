#pragma once

// Type erased analytic map R^n -> R^m. One generic callable is instantiated
// at three scalar types: plain double, Dual<double> (first derivatives) and
// Dual<Dual<double>> (second derivatives, needed when a derived quantity such
// as a normal field computed from Jacobian cofactors is differentiated again).
//
// Invariant: evaluating on plain reals and on dual numbers with a zero
// derivative part agree exactly; all evaluators are const and reentrant.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

#include <Eigen/Core>

#include "frontal/dual.hpp"
#include "frontal/errors.hpp"

namespace frontal {

class DifferentiableMap {
 public:
  using RealFn = std::function<void(std::span<const double>, std::span<double>)>;
  using Dual1Fn = std::function<void(std::span<const Dual1>, std::span<Dual1>)>;
  using Dual2Fn = std::function<void(std::span<const Dual2>, std::span<Dual2>)>;

  DifferentiableMap() = default;

  // Build from a single generic callable f(span<const T>, span<T>).
  template <typename F>
  DifferentiableMap(int dimension_in, int dimension_out, F f)
      : n_in_(dimension_in),
        n_out_(dimension_out),
        real_([f](std::span<const double> x, std::span<double> y) { f(x, y); }),
        dual1_([f](std::span<const Dual1> x, std::span<Dual1> y) { f(x, y); }),
        dual2_([f](std::span<const Dual2> x, std::span<Dual2> y) { f(x, y); }) {}

  // Explicit evaluators; pass an empty Dual2Fn for maps whose second
  // derivatives are unavailable (they fail loudly if requested).
  DifferentiableMap(int dimension_in, int dimension_out, RealFn real,
                    Dual1Fn dual1, Dual2Fn dual2 = {})
      : n_in_(dimension_in),
        n_out_(dimension_out),
        real_(std::move(real)),
        dual1_(std::move(dual1)),
        dual2_(std::move(dual2)) {}

  int dimension_in() const { return n_in_; }
  int dimension_out() const { return n_out_; }
  bool valid() const { return static_cast<bool>(real_); }

  void eval(std::span<const double> x, std::span<double> y) const { real_(x, y); }
  void eval(std::span<const Dual1> x, std::span<Dual1> y) const { dual1_(x, y); }
  void eval(std::span<const Dual2> x, std::span<Dual2> y) const {
    if (!dual2_) throw Error("map does not support second derivatives");
    dual2_(x, y);
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(n_out_);
    eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
         std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
    return y;
  }

 private:
  int n_in_ = 0;
  int n_out_ = 0;
  RealFn real_;
  Dual1Fn dual1_;
  Dual2Fn dual2_;
};

}  // namespace frontal
