#pragma once

// Sampled fields over a rectangular grid with uniform spacing per axis.
// Node ordering is row major with the last axis fastest, and each node
// stores a contiguous block of values_per_node doubles.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "frontal/errors.hpp"

namespace frontal {

struct GridField {
  std::vector<std::vector<double>> axes;  // strictly increasing, uniform
  int values_per_node = 0;
  std::vector<double> values;  // node_count * values_per_node entries

  int dimension() const { return static_cast<int>(axes.size()); }

  std::size_t node_count() const {
    std::size_t c = 1;
    for (const auto& ax : axes) c *= ax.size();
    return c;
  }

  double spacing(int axis) const {
    const auto& ax = axes[static_cast<std::size_t>(axis)];
    return (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
  }

  std::size_t flat_index(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes.size(); ++i)
      flat = flat * axes[i].size() + static_cast<std::size_t>(idx[i]);
    return flat;
  }

  void unflatten(std::size_t flat, std::span<int> idx) const {
    for (std::size_t i = axes.size(); i-- > 0;) {
      idx[i] = static_cast<int>(flat % axes[i].size());
      flat /= axes[i].size();
    }
  }

  Eigen::VectorXd value_at(std::size_t flat) const {
    Eigen::VectorXd v(values_per_node);
    for (int k = 0; k < values_per_node; ++k)
      v[k] = values[flat * static_cast<std::size_t>(values_per_node) +
                    static_cast<std::size_t>(k)];
    return v;
  }

  void set_value(std::size_t flat, const Eigen::VectorXd& v) {
    for (int k = 0; k < values_per_node; ++k)
      values[flat * static_cast<std::size_t>(values_per_node) +
             static_cast<std::size_t>(k)] = v[k];
  }

  Eigen::VectorXd point_at(std::span<const int> idx) const {
    Eigen::VectorXd p(dimension());
    for (std::size_t i = 0; i < axes.size(); ++i)
      p[static_cast<Eigen::Index>(i)] = axes[i][static_cast<std::size_t>(idx[i])];
    return p;
  }

  // Uniform spacing within 1e-12 relative and shape consistency.
  void validate() const {
    for (const auto& ax : axes) {
      if (ax.size() < 2) throw Error("grid axis needs at least 2 points");
      double h = (ax.back() - ax.front()) / static_cast<double>(ax.size() - 1);
      if (!(h > 0)) throw Error("grid axis must be strictly increasing");
      for (std::size_t k = 0; k + 1 < ax.size(); ++k) {
        double step = ax[k + 1] - ax[k];
        if (std::abs(step - h) > 1e-12 * std::abs(h))
          throw Error("grid axis spacing is not uniform");
      }
    }
    if (values.size() != node_count() * static_cast<std::size_t>(values_per_node))
      throw Error("grid value array shape mismatch");
  }
};

// Endpoint exact uniform axis: blends lo and hi so the midpoint of an odd
// count lands on an exact value and the ends carry no rounding.
inline std::vector<double> make_axis(double lo, double hi, int count) {
  if (count < 2) throw Error("axis count must be at least 2");
  std::vector<double> ax(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    double t = static_cast<double>(k) / static_cast<double>(count - 1);
    ax[static_cast<std::size_t>(k)] = lo * (1.0 - t) + hi * t;
  }
  return ax;
}

}  // namespace frontal
