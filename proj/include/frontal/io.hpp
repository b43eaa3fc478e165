#pragma once

// File formats: JSON Legendre data files (sampled normal field and height
// function over a uniform grid), JSON recovery results, and Wavefront OBJ
// meshes of recovered surfaces. All writers are deterministic: equal inputs
// produce byte identical files.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include <Eigen/Core>

#include "frontal/errors.hpp"
#include "frontal/gallery.hpp"
#include "frontal/grid.hpp"
#include "frontal/recovery.hpp"

namespace frontal {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kDataFormatVersion = 1;

namespace detail {

// Shortest round trip decimal form, used by the OBJ writer.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void require_uniform_axis(const std::vector<double>& ax) {
  if (ax.size() < 2) throw ConfigError("axis needs at least two nodes");
  const double span = ax.back() - ax.front();
  const double h = span / static_cast<double>(ax.size() - 1);
  for (std::size_t k = 1; k < ax.size(); ++k) {
    const double step = ax[k] - ax[k - 1];
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(span)))
      throw ConfigError("axis is not uniform");
  }
}

inline ordered_json axes_to_json(const std::vector<std::vector<double>>& axes) {
  ordered_json out = ordered_json::array();
  for (const auto& ax : axes) {
    require_uniform_axis(ax);
    out.push_back({{"min", ax.front()},
                   {"max", ax.back()},
                   {"count", static_cast<int>(ax.size())}});
  }
  return out;
}

inline std::vector<std::vector<double>> axes_from_json(const ordered_json& j) {
  if (!j.is_array() || j.empty()) throw IOError("data file: axes must be a non-empty array");
  std::vector<std::vector<double>> axes;
  for (const auto& a : j) {
    if (!a.is_object() || !a.contains("min") || !a.contains("max") || !a.contains("count"))
      throw IOError("data file: each axis needs min, max, count");
    const double lo = a.at("min").get<double>();
    const double hi = a.at("max").get<double>();
    const int count = a.at("count").get<int>();
    if (!(lo < hi)) throw IOError("data file: axis min must be below max");
    if (count < 2) throw IOError("data file: axis count must be at least 2");
    axes.push_back(make_axis(lo, hi, count));
  }
  return axes;
}

inline ordered_json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw IOError(path + ": " + ex.what());
  }
}

inline void dump_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IOError("write failed: " + path);
}

}  // namespace detail

inline ordered_json legendre_data_to_json(const LegendreData& data) {
  if (data.analytic_mode())
    throw ConfigError("data files hold sampled data; sample the analytic field first");
  ordered_json j;
  j["version"] = kDataFormatVersion;
  j["n"] = data.n;
  j["axes"] = detail::axes_to_json(data.nu_grid.axes);
  j["nu"] = data.nu_grid.values;
  j["a"] = data.a_grid.values;
  if (!data.mask.empty()) j["mask"] = data.mask;
  return j;
}

inline LegendreData legendre_data_from_json(const ordered_json& j) {
  if (!j.is_object()) throw IOError("data file: top level must be an object");
  for (const char* key : {"version", "n", "axes", "nu", "a"})
    if (!j.contains(key)) throw IOError(std::string("data file: missing field ") + key);
  if (j.at("version").get<int>() != kDataFormatVersion)
    throw IOError("data file: unsupported version");
  const int n = j.at("n").get<int>();
  if (n < 1) throw IOError("data file: n must be positive");
  auto axes = detail::axes_from_json(j.at("axes"));
  if (static_cast<int>(axes.size()) != n)
    throw IOError("data file: axes count does not match n");

  GridField nu;
  nu.axes = axes;
  nu.values_per_node = n + 1;
  GridField a;
  a.axes = axes;
  a.values_per_node = 1;
  try {
    nu.values = j.at("nu").get<std::vector<double>>();
    a.values = j.at("a").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& ex) {
    throw IOError(std::string("data file: ") + ex.what());
  }
  std::vector<std::uint8_t> mask;
  if (j.contains("mask")) {
    try {
      mask = j.at("mask").get<std::vector<std::uint8_t>>();
    } catch (const nlohmann::json::exception& ex) {
      throw IOError(std::string("data file: ") + ex.what());
    }
  }
  const std::size_t nodes = nu.node_count();
  if (nu.values.size() != nodes * static_cast<std::size_t>(n + 1))
    throw IOError("data file: nu has the wrong length");
  if (a.values.size() != nodes) throw IOError("data file: a has the wrong length");
  if (!mask.empty() && mask.size() != nodes)
    throw IOError("data file: mask has the wrong length");
  try {
    return LegendreData::sampled(std::move(nu), std::move(a), std::move(mask));
  } catch (const Error& ex) {
    throw IOError(std::string("data file: ") + ex.what());
  }
}

inline void write_legendre_data(const std::string& path, const LegendreData& data) {
  detail::dump_file(path, legendre_data_to_json(data));
}

inline LegendreData read_legendre_data(const std::string& path) {
  return legendre_data_from_json(detail::parse_file(path));
}

// Evaluate analytic Legendre data on a grid. Nodes whose singular residual
// falls inside the exclusion tube are masked and zero filled, so files stay
// free of non finite values.
inline LegendreData sample_data(const LegendreData& analytic,
                                const std::vector<std::vector<double>>& axes,
                                const std::function<double(const Eigen::VectorXd&)>&
                                    singular_residual = {}) {
  if (!analytic.analytic_mode())
    throw ConfigError("sample_data: analytic data required");
  if (static_cast<int>(axes.size()) != analytic.n)
    throw ConfigError("sample_data: axes count does not match n");

  GridField nu;
  nu.axes = axes;
  nu.values_per_node = analytic.n + 1;
  GridField a;
  a.axes = axes;
  a.values_per_node = 1;
  const std::size_t nodes = nu.node_count();
  nu.values.assign(nodes * static_cast<std::size_t>(nu.values_per_node), 0.0);
  a.values.assign(nodes, 0.0);
  std::vector<std::uint8_t> mask(nodes, 1);

  std::vector<int> idx(static_cast<std::size_t>(analytic.n));
  bool any_masked = false;
  for (std::size_t node = 0; node < nodes; ++node) {
    nu.unflatten(node, idx);
    const Eigen::VectorXd x = nu.point_at(idx);
    if (singular_residual && singular_residual(x) <= kSingularTube) {
      mask[node] = 0;
      any_masked = true;
      continue;
    }
    const Eigen::VectorXd nv = analytic.nu_map(x);
    const Eigen::VectorXd av = analytic.a_map(x);
    if (!nv.allFinite() || !av.allFinite()) {
      mask[node] = 0;
      any_masked = true;
      continue;
    }
    nu.set_value(node, nv);
    a.set_value(node, av);
  }
  return LegendreData::sampled(std::move(nu), std::move(a),
                               any_masked ? std::move(mask) : std::vector<std::uint8_t>{});
}

// Orient a grid sampled Legendre pair consistently: normals computed from
// Jacobian cofactors carry an arbitrary per node sign, and finite
// differences across a sign flip see a jump of size 2|nu|/h. Each node is
// aligned with an already processed grid neighbor (flat order visits all
// predecessors first); flipping nu negates the height sample with it, which
// leaves the encoded parametrization unchanged.
inline void align_legendre_signs(GridField& nu, GridField& a,
                                 const std::vector<std::uint8_t>& mask = {}) {
  const int n = nu.dimension();
  if (a.node_count() != nu.node_count() || a.values_per_node != 1)
    throw ConfigError("align_legendre_signs: grid shape mismatch");
  if (nu.values.size() != nu.node_count() * static_cast<std::size_t>(nu.values_per_node) ||
      a.values.size() != a.node_count())
    throw ConfigError("align_legendre_signs: value array shape mismatch");
  if (!mask.empty() && mask.size() != nu.node_count())
    throw ConfigError("align_legendre_signs: mask length mismatch");
  auto usable = [&](std::size_t flat) { return mask.empty() || mask[flat] != 0; };
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::vector<int> nb(static_cast<std::size_t>(n));
  for (std::size_t node = 0; node < nu.node_count(); ++node) {
    if (!usable(node)) continue;
    nu.unflatten(node, idx);
    for (int axis = 0; axis < n; ++axis) {
      if (idx[static_cast<std::size_t>(axis)] == 0) continue;
      nb = idx;
      nb[static_cast<std::size_t>(axis)] -= 1;
      const std::size_t nb_flat = nu.flat_index(nb);
      if (!usable(nb_flat)) continue;
      const Eigen::VectorXd here = nu.value_at(node);
      if (here.dot(nu.value_at(nb_flat)) < 0.0) {
        nu.set_value(node, Eigen::VectorXd(-here));
        a.values[node] = -a.values[node];
      }
      break;  // one already aligned neighbor decides the sign
    }
  }
}

inline const char* status_name(PointStatus s) {
  switch (s) {
    case PointStatus::Regular: return "regular";
    case PointStatus::ExtendedByLimit: return "extended";
    default: return "unresolved";
  }
}

inline ordered_json recovery_to_json(const RecoveredMap& rec) {
  ordered_json j;
  j["version"] = kDataFormatVersion;
  j["n"] = rec.f.dimension();
  j["axes"] = detail::axes_to_json(rec.f.axes);
  j["f"] = rec.f.values;
  j["b"] = rec.b.values;
  std::vector<int> status;
  status.reserve(rec.status.size());
  for (PointStatus s : rec.status) status.push_back(static_cast<int>(s));
  j["status"] = status;
  j["status_codes"] = {{"0", "regular"}, {"1", "extended"}, {"2", "unresolved"}};
  j["counts"] = {{"regular", rec.regular_count},
                 {"extended", rec.extended_count},
                 {"unresolved", rec.unresolved_count}};
  j["diagnostics"] = {{"max_height_residual", rec.max_height_residual},
                      {"rms_height_residual", rec.rms_height_residual},
                      {"max_tangency_residual", rec.max_tangency_residual}};
  return j;
}

inline void write_recovery(const std::string& path, const RecoveredMap& rec) {
  detail::dump_file(path, recovery_to_json(rec));
}

struct MeshStats {
  std::size_t vertices = 0;
  std::size_t faces = 0;
};

// Triangulated OBJ mesh of a recovered surface in R^3 over a planar grid.
// Unresolved nodes lose their vertex; any quad touching a lost vertex is
// dropped. Quads are split along the (i, j) -> (i+1, j+1) diagonal.
inline MeshStats write_mesh_obj(const std::string& path, const GridField& f,
                                const std::vector<std::uint8_t>& keep = {}) {
  if (f.dimension() != 2 || f.values_per_node != 3)
    throw DimensionUnsupported("mesh output needs a surface in R^3 over a plane");
  f.validate();
  if (!keep.empty() && keep.size() != f.node_count())
    throw ConfigError("mesh: keep mask has the wrong length");

  const int nx = static_cast<int>(f.axes[0].size());
  const int ny = static_cast<int>(f.axes[1].size());
  std::vector<long> vertex_id(f.node_count(), 0);  // 1-based OBJ indices

  MeshStats stats;
  std::ostringstream os;
  long next = 1;
  std::vector<int> idx(2);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      idx[0] = i;
      idx[1] = j;
      const std::size_t flat = f.flat_index(idx);
      if (!keep.empty() && keep[flat] == 0) continue;
      const Eigen::VectorXd v = f.value_at(flat);
      if (!v.allFinite()) continue;
      vertex_id[flat] = next++;
      os << "v " << detail::format_double(v[0]) << ' ' << detail::format_double(v[1])
         << ' ' << detail::format_double(v[2]) << '\n';
    }
  }
  auto flat_of = [&](int i, int j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(ny) +
           static_cast<std::size_t>(j);
  };
  for (int i = 0; i + 1 < nx; ++i) {
    for (int j = 0; j + 1 < ny; ++j) {
      const long a = vertex_id[flat_of(i, j)];
      const long b = vertex_id[flat_of(i + 1, j)];
      const long c = vertex_id[flat_of(i + 1, j + 1)];
      const long d = vertex_id[flat_of(i, j + 1)];
      if (a && b && c) {
        os << "f " << a << ' ' << b << ' ' << c << '\n';
        ++stats.faces;
      }
      if (a && c && d) {
        os << "f " << a << ' ' << c << ' ' << d << '\n';
        ++stats.faces;
      }
    }
  }
  stats.vertices = static_cast<std::size_t>(next - 1);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot write " + path);
  out << os.str();
  if (!out) throw IOError("write failed: " + path);
  return stats;
}

}  // namespace frontal
