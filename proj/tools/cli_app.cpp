#include "cli_app.hpp"

#include <CLI11.hpp>
#include <frontal/frontal.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace frontal_cli {
namespace {

using frontal::ConfigError;
using frontal::DifferentiableMap;
using frontal::Error;
using frontal::GalleryEntry;
using frontal::GridField;
using frontal::LegendreData;
using frontal::PointStatus;
using frontal::RecoveredMap;
using frontal::RecoverOptions;

// Exit codes shared by every command.
constexpr int kExitOk = 0;
constexpr int kExitPartial = 2;
constexpr int kExitFailure = 3;
constexpr int kExitBadConfig = 4;

// ---------------------------------------------------------------------------
// Output: machine readable key=value lines on stdout, an aligned table on
// stderr. Both views are built from the same rows so they cannot drift.

class Report {
 public:
  void add(const std::string& key, const std::string& value) {
    rows_.emplace_back(key, value);
  }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, double value) {
    add(key, frontal::detail::format_double(value));
  }
  void add(const std::string& key, bool value) { add(key, value ? "true" : "false"); }
  template <typename Int>
    requires std::is_integral_v<Int>
  void add(const std::string& key, Int value) {
    add(key, std::to_string(value));
  }

  void emit() const {
    std::size_t width = 0;
    for (const auto& [k, v] : rows_) width = std::max(width, k.size());
    for (const auto& [k, v] : rows_) std::cout << k << '=' << v << '\n';
    for (const auto& [k, v] : rows_)
      std::cerr << "  " << k << std::string(width - k.size() + 2, ' ') << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string csv(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += frontal::detail::format_double(v[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Argument parsing helpers.

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, delim)) parts.push_back(item);
  return parts;
}

double parse_number(const std::string& tok, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw ConfigError(what + ": trailing characters in '" + tok + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(what + ": cannot parse number '" + tok + "'");
  }
}

// "min:max:count[,min:max:count...]" with at least 3 nodes per axis.
std::vector<std::vector<double>> parse_grid_spec(const std::string& spec) {
  std::vector<std::vector<double>> axes;
  for (const std::string& part : split(spec, ',')) {
    const std::vector<std::string> f = split(part, ':');
    if (f.size() != 3) throw ConfigError("grid: each axis needs min:max:count, got '" + part + "'");
    const double lo = parse_number(f[0], "grid min");
    const double hi = parse_number(f[1], "grid max");
    const double cf = parse_number(f[2], "grid count");
    const int count = static_cast<int>(cf);
    if (static_cast<double>(count) != cf) throw ConfigError("grid: count must be an integer");
    if (count < 3) throw ConfigError("grid: need at least 3 nodes per axis");
    if (!(lo < hi)) throw ConfigError("grid: min must be below max");
    axes.push_back(frontal::make_axis(lo, hi, count));
  }
  if (axes.empty()) throw ConfigError("grid: empty specification");
  return axes;
}

Eigen::VectorXd parse_point_spec(const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ',');
  if (parts.empty()) throw ConfigError("point: empty specification");
  Eigen::VectorXd x(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = parse_number(parts[i], "point");
  return x;
}

std::vector<std::vector<double>> default_axes(const GalleryEntry& entry, int count) {
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < entry.n; ++i)
    axes.push_back(frontal::make_axis(entry.lo[i], entry.hi[i], count));
  return axes;
}

void check_axes_dim(const std::vector<std::vector<double>>& axes, int n) {
  if (static_cast<int>(axes.size()) != n)
    throw ConfigError("grid: expected " + std::to_string(n) + " axes, got " +
                      std::to_string(axes.size()));
}

// ---------------------------------------------------------------------------
// Options shared across subcommands. Presence flags distinguish "left at
// default" from "explicitly set" where the default depends on the backend.

struct Options {
  std::string example;
  std::string input;
  std::string out;
  std::string grid;
  std::string point;
  std::string backend = "exact";
  int stage = 0;
  bool stage_set = false;
  std::uint64_t seed = RecoverOptions{}.seed;
  double det_eps = frontal::kDetEpsilon;
  double pole_eps = frontal::kPoleEpsilon;
  double margin = 0.0;
  bool margin_set = false;
  double tol = 0.0;
  bool tol_set = false;

  std::optional<int> stage_opt() const {
    return stage_set ? std::optional<int>(stage) : std::nullopt;
  }
  RecoverOptions recover_options() const {
    RecoverOptions o;
    o.det_epsilon = det_eps;
    o.pole_epsilon = pole_eps;
    o.seed = seed;
    return o;
  }
};

void require_example_xor_input(const Options& o) {
  if (o.example.empty() == o.input.empty())
    throw ConfigError("need exactly one of --example or --input");
}

// Ground truth error over the resolved nodes of a recovery.
struct TruthError {
  std::size_t nodes = 0;
  double max_abs = 0.0;
  double rms = 0.0;
};

TruthError truth_error(const RecoveredMap& rec, const DifferentiableMap& target) {
  TruthError e;
  double sum_sq = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(rec.f.dimension()));
  for (std::size_t node = 0; node < rec.status.size(); ++node) {
    if (rec.status[node] == PointStatus::Unresolved) continue;
    rec.f.unflatten(node, idx);
    const Eigen::VectorXd truth = target(rec.f.point_at(idx));
    const double err = (rec.f.value_at(node) - truth).cwiseAbs().maxCoeff();
    e.max_abs = std::max(e.max_abs, err);
    sum_sq += err * err;
    ++e.nodes;
  }
  if (e.nodes > 0) e.rms = std::sqrt(sum_sq / static_cast<double>(e.nodes));
  return e;
}

int exit_from_counts(const RecoveredMap& rec) {
  if (rec.unresolved_count == 0) return kExitOk;
  if (rec.unresolved_count < rec.status.size()) return kExitPartial;
  return kExitFailure;
}

void add_recovery_rows(Report& rep, const RecoveredMap& rec) {
  rep.add("nodes", rec.status.size());
  rep.add("regular", rec.regular_count);
  rep.add("extended", rec.extended_count);
  rep.add("unresolved", rec.unresolved_count);
  rep.add("max_height_residual", rec.max_height_residual);
  rep.add("rms_height_residual", rec.rms_height_residual);
  rep.add("max_tangency_residual", rec.max_tangency_residual);
}

// ---------------------------------------------------------------------------
// sample: write the closed form Legendre data of a gallery entry to a grid
// file, masking nodes where the printed parametrization is singular.

int cmd_sample(const Options& o) {
  if (o.example.empty()) throw ConfigError("sample needs --example");
  if (o.out.empty()) throw ConfigError("sample needs --out");
  const GalleryEntry& entry = frontal::lookup(o.example);
  const auto axes = o.grid.empty() ? default_axes(entry, 51) : parse_grid_spec(o.grid);
  check_axes_dim(axes, entry.n);

  const LegendreData analytic = frontal::legendre_data_of(entry, o.stage_opt());
  const LegendreData data = frontal::sample_data(analytic, axes, entry.map_singular_residual);
  frontal::write_legendre_data(o.out, data);

  std::size_t masked = 0;
  for (std::uint8_t m : data.mask)
    if (m == 0) ++masked;

  Report rep;
  rep.add("command", "sample");
  rep.add("example", entry.name);
  if (o.stage_set) rep.add("stage", o.stage);
  rep.add("n", entry.n);
  rep.add("nodes", data.nu_grid.node_count());
  rep.add("masked", masked);
  rep.add("out", o.out);
  rep.emit();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// recover: rebuild the parametrization from Legendre data, either the exact
// closed forms of a gallery entry or a sampled grid file.

int cmd_recover(const Options& o) {
  require_example_xor_input(o);

  LegendreData data;
  std::vector<std::vector<double>> axes;
  std::optional<DifferentiableMap> target;
  std::string source;

  if (!o.input.empty()) {
    if (o.backend != "fd")
      throw ConfigError("file input holds sampled data; pass --backend fd");
    if (!o.grid.empty()) throw ConfigError("the grid is fixed by the input file");
    data = frontal::read_legendre_data(o.input);
    axes = data.nu_grid.axes;
    source = o.input;
  } else {
    const GalleryEntry& entry = frontal::lookup(o.example);
    axes = o.grid.empty() ? default_axes(entry, 51) : parse_grid_spec(o.grid);
    check_axes_dim(axes, entry.n);
    if (o.backend == "exact") {
      data = frontal::legendre_data_of(entry, o.stage_opt());
    } else if (o.backend == "fd") {
      data = frontal::sample_data(frontal::legendre_data_of(entry, o.stage_opt()), axes,
                                  entry.map_singular_residual);
    } else {
      throw ConfigError("backend must be exact or fd");
    }
    target = frontal::target_map(entry, o.stage_opt());
    source = entry.name;
  }

  const RecoveredMap rec = frontal::recover_grid(data, axes, o.recover_options());

  Report rep;
  rep.add("command", "recover");
  rep.add("source", source);
  if (o.stage_set) rep.add("stage", o.stage);
  rep.add("backend", o.input.empty() ? o.backend : "fd");
  add_recovery_rows(rep, rec);
  if (target) {
    const TruthError e = truth_error(rec, *target);
    rep.add("error_nodes", e.nodes);
    rep.add("max_error", e.max_abs);
    rep.add("rms_error", e.rms);
  }
  if (!o.out.empty()) {
    frontal::write_recovery(o.out, rec);
    rep.add("out", o.out);
  }
  rep.emit();
  return exit_from_counts(rec);
}

// ---------------------------------------------------------------------------
// limit: double limit demo. Recover one point from every stage of an entry's
// perturbation family, extrapolate the stage values to stage = infinity, and
// compare with the unperturbed map.

int cmd_limit(const Options& o) {
  if (o.example.empty()) throw ConfigError("limit needs --example");
  if (o.point.empty()) throw ConfigError("limit needs --point");
  const GalleryEntry& entry = frontal::lookup(o.example);
  if (!entry.has_family)
    throw ConfigError(entry.name + ": entry has no perturbation family");
  const Eigen::VectorXd x = parse_point_spec(o.point);
  if (x.size() != entry.n)
    throw ConfigError("point: expected " + std::to_string(entry.n) + " coordinates");

  const auto family = [&entry](int stage) { return frontal::legendre_data_of(entry, stage); };
  const frontal::SequenceRecovery seq =
      frontal::limit_recover(family, entry.default_stages, x, o.recover_options());
  const Eigen::VectorXd truth = entry.f(x);

  Report rep;
  rep.add("command", "limit");
  rep.add("example", entry.name);
  rep.add("point", csv(x));
  for (const frontal::StageResult& s : seq.stages) {
    const std::string prefix = "stage_" + std::to_string(s.stage);
    rep.add(prefix + "_status", frontal::status_name(s.status));
    if (s.status != PointStatus::Unresolved) {
      rep.add(prefix + "_value", csv(s.value));
      rep.add(prefix + "_indicator", s.inner_indicator);
    }
  }
  rep.add("stages_succeeded", seq.successful);
  rep.add("recovered", csv(seq.outer));
  rep.add("outer_indicator", seq.outer_indicator);
  rep.add("target", csv(truth));
  rep.add("max_error", (seq.outer - truth).cwiseAbs().maxCoeff());
  rep.emit();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// perturb: build a quadratic perturbation of an entry's map whose chosen
// stage is regular on almost the whole grid. Constants are drawn from the
// seed and redrawn (deterministically) until the stage's regular set covers
// more than 99% of the nodes; almost every draw works, so this terminates
// quickly whenever the construction can help the map at all.

int cmd_perturb(const Options& o) {
  if (o.example.empty()) throw ConfigError("perturb needs --example");
  const GalleryEntry& entry = frontal::lookup(o.example);
  const int stage = o.stage_set ? o.stage : 1;
  if (stage < 1) throw ConfigError("stage must be >= 1");
  const auto axes = o.grid.empty() ? default_axes(entry, 21) : parse_grid_spec(o.grid);
  check_axes_dim(axes, entry.n);

  GridField probe;
  probe.axes = axes;
  probe.values_per_node = 1;
  const std::size_t nodes = probe.node_count();

  Eigen::VectorXd x0(entry.n);
  for (int i = 0; i < entry.n; ++i) x0[i] = 0.5 * (entry.lo[i] + entry.hi[i]);

  constexpr int kMaxAttempts = 32;
  constexpr double kRequiredFraction = 0.99;

  Eigen::VectorXd constants;
  frontal::PerturbationSpec spec;
  DifferentiableMap perturbed;
  std::vector<std::uint8_t> regular;
  double fraction = 0.0;
  int attempts = 0;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(frontal::detail::mix_seed(o.seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::VectorXd c(entry.n);
    do {
      for (int i = 0; i < entry.n; ++i) c[i] = unit(rng);
    } while (c.norm() < 0.25);

    frontal::PerturbationSpec candidate = frontal::PerturbationSpec::quadratic(c, x0);
    DifferentiableMap g = frontal::apply_stage(entry.f, candidate, stage);

    std::vector<std::uint8_t> reg(nodes, 0);
    std::size_t regular_count = 0;
    std::vector<int> idx(static_cast<std::size_t>(entry.n));
    for (std::size_t node = 0; node < nodes; ++node) {
      probe.unflatten(node, idx);
      const Eigen::VectorXd x = probe.point_at(idx);
      if (frontal::classify(g, x).classification == frontal::Classification::Regular) {
        reg[node] = 1;
        ++regular_count;
      }
    }
    fraction = static_cast<double>(regular_count) / static_cast<double>(nodes);
    attempts = attempt + 1;
    if (fraction > kRequiredFraction) {
      constants = std::move(c);
      spec = std::move(candidate);
      perturbed = std::move(g);
      regular = std::move(reg);
      break;
    }
  }
  if (regular.empty())
    throw Error("perturb: no sampled constants made the stage map regular on more than 99% "
                "of the grid after " +
                std::to_string(kMaxAttempts) + " draws");

  Report rep;
  rep.add("command", "perturb");
  rep.add("example", entry.name);
  rep.add("stage", stage);
  rep.add("attempts", attempts);
  rep.add("regular_fraction", fraction);
  rep.add("constants", csv(constants));
  rep.add("center", csv(x0));
  rep.add("scale", spec.schedule(stage));
  rep.add("nodes", nodes);

  if (!o.out.empty()) {
    // Sample the perturbed map's own Legendre data: the normal field from
    // its Jacobian cofactors and the induced height function. Nodes where
    // the stage map is singular stay masked.
    GridField nu;
    nu.axes = axes;
    nu.values_per_node = entry.n + 1;
    GridField a;
    a.axes = axes;
    a.values_per_node = 1;
    nu.values.assign(nodes * static_cast<std::size_t>(entry.n + 1), 0.0);
    a.values.assign(nodes, 0.0);
    std::vector<std::uint8_t> mask(nodes, 1);
    std::size_t masked = 0;
    std::vector<int> idx(static_cast<std::size_t>(entry.n));
    for (std::size_t node = 0; node < nodes; ++node) {
      nu.unflatten(node, idx);
      const Eigen::VectorXd x = nu.point_at(idx);
      if (!regular[node]) {
        mask[node] = 0;
        ++masked;
        continue;
      }
      try {
        const Eigen::VectorXd normal = frontal::gauss_from_parametrization(perturbed, x);
        nu.set_value(node, normal);
        a.set_value(node, Eigen::VectorXd::Constant(1, perturbed(x).dot(normal)));
      } catch (const Error&) {
        mask[node] = 0;
        ++masked;
      }
    }
    frontal::align_legendre_signs(nu, a, mask);
    const LegendreData data = LegendreData::sampled(
        std::move(nu), std::move(a),
        masked > 0 ? std::move(mask) : std::vector<std::uint8_t>{});
    frontal::write_legendre_data(o.out, data);
    rep.add("masked", masked);
    rep.add("out", o.out);
  }
  rep.emit();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mesh: triangulated OBJ export, either of a gallery surface or of the
// recovery of a sampled data file. Surfaces only (n = 2).

int cmd_mesh(const Options& o) {
  require_example_xor_input(o);
  if (o.out.empty()) throw ConfigError("mesh needs --out");

  Report rep;
  rep.add("command", "mesh");
  frontal::MeshStats stats;
  int exit_code = kExitOk;

  if (!o.example.empty()) {
    const GalleryEntry& entry = frontal::lookup(o.example);
    if (entry.n != 2)
      throw frontal::DimensionUnsupported(entry.name + ": mesh export needs a surface (n = 2)");
    const auto axes = o.grid.empty() ? default_axes(entry, 51) : parse_grid_spec(o.grid);
    check_axes_dim(axes, 2);
    const DifferentiableMap target = frontal::target_map(entry, o.stage_opt());

    GridField field;
    field.axes = axes;
    field.values_per_node = 3;
    const std::size_t nodes = field.node_count();
    field.values.assign(nodes * 3, 0.0);
    std::vector<std::uint8_t> keep(nodes, 1);
    std::size_t masked = 0;
    std::vector<int> idx(2);
    for (std::size_t node = 0; node < nodes; ++node) {
      field.unflatten(node, idx);
      const Eigen::VectorXd x = field.point_at(idx);
      if (entry.map_singular_residual(x) <= frontal::kSingularTube) {
        keep[node] = 0;
        ++masked;
        continue;
      }
      field.set_value(node, target(x));
    }
    stats = frontal::write_mesh_obj(o.out, field, keep);
    rep.add("source", entry.name);
    if (o.stage_set) rep.add("stage", o.stage);
    rep.add("nodes", nodes);
    rep.add("masked", masked);
  } else {
    const LegendreData data = frontal::read_legendre_data(o.input);
    if (data.n != 2)
      throw frontal::DimensionUnsupported("mesh export needs a surface (n = 2)");
    const RecoveredMap rec = frontal::recover_grid(data, {}, o.recover_options());
    std::vector<std::uint8_t> keep(rec.status.size(), 1);
    for (std::size_t node = 0; node < rec.status.size(); ++node)
      if (rec.status[node] == PointStatus::Unresolved) keep[node] = 0;
    stats = frontal::write_mesh_obj(o.out, rec.f, keep);
    rep.add("source", o.input);
    add_recovery_rows(rep, rec);
    exit_code = exit_from_counts(rec);
  }

  rep.add("vertices", stats.vertices);
  rep.add("faces", stats.faces);
  rep.add("out", o.out);
  rep.emit();
  return stats.vertices == 0 ? kExitFailure : exit_code;
}

// ---------------------------------------------------------------------------
// verify: recover a gallery entry and measure the reconstruction error
// against the printed map over a measurement window. The window drops nodes
// within --margin of the domain boundary and nodes whose distance to the
// printed degeneracy set of the normal field is at most --margin (the
// residual functions of the gallery measure that distance); nodes the
// recovery left unresolved (or, with the fd backend, merely extended) are
// never measured. Defaults: margin 0 and tolerance 1e-8 for the exact
// backend, margin 0.25 and tolerance 1e-4 for fd grids.

int cmd_verify(const Options& o) {
  if (o.example.empty()) throw ConfigError("verify needs --example");
  if (o.backend != "exact" && o.backend != "fd")
    throw ConfigError("backend must be exact or fd");
  const bool fd = o.backend == "fd";
  const double margin = o.margin_set ? o.margin : (fd ? 0.25 : 0.0);
  const double tol = o.tol_set ? o.tol : (fd ? 1e-4 : 1e-8);
  if (margin < 0.0) throw ConfigError("margin must be >= 0");
  if (tol <= 0.0) throw ConfigError("tolerance must be > 0");

  const GalleryEntry& entry = frontal::lookup(o.example);
  const auto axes = o.grid.empty() ? default_axes(entry, 51) : parse_grid_spec(o.grid);
  check_axes_dim(axes, entry.n);
  const DifferentiableMap target = frontal::target_map(entry, o.stage_opt());

  LegendreData data = frontal::legendre_data_of(entry, o.stage_opt());
  if (fd) data = frontal::sample_data(data, axes, entry.map_singular_residual);

  const RecoveredMap rec = frontal::recover_grid(data, axes, o.recover_options());

  const double gauss_cut = std::max(margin, frontal::kSingularTube);
  std::size_t measured = 0, skipped_status = 0, skipped_singular = 0, skipped_boundary = 0;
  double max_err = 0.0, sum_sq = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(entry.n));
  for (std::size_t node = 0; node < rec.status.size(); ++node) {
    const bool usable = fd ? rec.status[node] == PointStatus::Regular
                           : rec.status[node] != PointStatus::Unresolved;
    if (!usable) {
      ++skipped_status;
      continue;
    }
    rec.f.unflatten(node, idx);
    const Eigen::VectorXd x = rec.f.point_at(idx);
    double boundary = std::numeric_limits<double>::infinity();
    for (int i = 0; i < entry.n; ++i) {
      const auto& ax = axes[static_cast<std::size_t>(i)];
      boundary = std::min({boundary, x[i] - ax.front(), ax.back() - x[i]});
    }
    if (boundary < margin) {
      ++skipped_boundary;
      continue;
    }
    if (entry.gauss_singular_residual(x) <= gauss_cut) {
      ++skipped_singular;
      continue;
    }
    const double err = (rec.f.value_at(node) - target(x)).cwiseAbs().maxCoeff();
    max_err = std::max(max_err, err);
    sum_sq += err * err;
    ++measured;
  }
  const bool pass = measured > 0 && max_err <= tol;

  Report rep;
  rep.add("command", "verify");
  rep.add("example", entry.name);
  if (o.stage_set) rep.add("stage", o.stage);
  rep.add("backend", o.backend);
  rep.add("nodes", rec.status.size());
  rep.add("unresolved", rec.unresolved_count);
  rep.add("measured", measured);
  rep.add("skipped_status", skipped_status);
  rep.add("skipped_near_degenerate", skipped_singular);
  rep.add("skipped_near_boundary", skipped_boundary);
  rep.add("margin", margin);
  rep.add("max_error", max_err);
  rep.add("rms_error", measured > 0 ? std::sqrt(sum_sq / static_cast<double>(measured)) : 0.0);
  rep.add("tolerance", tol);
  rep.add("pass", pass);
  rep.emit();
  return pass ? kExitOk : kExitFailure;
}

std::string example_help() {
  std::string names;
  for (const std::string& n : frontal::gallery_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  return "Gallery entry (" + names + ")";
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{
      "Reconstruction of parametrizations from their normal field and height "
      "function, with singularity diagnostics, perturbation demos and mesh export."};
  app.require_subcommand(1);

  Options o;
  const std::string examples = example_help();

  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--example", o.example, examples);
    if (with_input)
      sub->add_option("--input", o.input, "Sampled data file produced by sample or perturb");
    sub->add_option("--stage", o.stage, "Perturbation stage (family entries)")
        ->each([&](const std::string&) { o.stage_set = true; });
    sub->add_option("--grid", o.grid,
                    "Evaluation grid, min:max:count per axis, comma separated "
                    "(counts >= 3; default: the entry's own box)");
    sub->add_option("--seed", o.seed, "Seed for chart rotations and constant draws");
    sub->add_option("--det-eps", o.det_eps, "Relative determinant threshold");
    sub->add_option("--pole-eps", o.pole_eps, "Chart pole threshold");
  };

  CLI::App* sample = app.add_subcommand(
      "sample", "Write the closed form normal field and height function to a grid file");
  add_common(sample, false);
  sample->add_option("--out", o.out, "Output data file")->required();

  CLI::App* recover = app.add_subcommand(
      "recover", "Rebuild the parametrization from exact or sampled data");
  add_common(recover, true);
  recover->add_option("--backend", o.backend, "exact or fd (file input requires fd)");
  recover->add_option("--out", o.out, "Recovery result file (optional)");

  CLI::App* limit = app.add_subcommand(
      "limit", "Double limit recovery of a family entry at one point");
  limit->add_option("--example", o.example, examples)->required();
  limit->add_option("--point", o.point, "Evaluation point, comma separated coordinates")
      ->required();
  limit->add_option("--seed", o.seed, "Seed for chart rotations");
  limit->add_option("--det-eps", o.det_eps, "Relative determinant threshold");
  limit->add_option("--pole-eps", o.pole_eps, "Chart pole threshold");

  CLI::App* perturb = app.add_subcommand(
      "perturb", "Draw a quadratic perturbation whose stage map is regular on "
                 "more than 99% of the grid, optionally sampling its data");
  add_common(perturb, false);
  perturb->add_option("--out", o.out, "Sampled data file of the perturbed map (optional)");

  CLI::App* mesh = app.add_subcommand(
      "mesh", "Triangulated OBJ export of a gallery surface or a recovered grid");
  add_common(mesh, true);
  mesh->add_option("--out", o.out, "Output OBJ file")->required();

  CLI::App* verify = app.add_subcommand(
      "verify", "Recover a gallery entry and check the error against the printed map");
  add_common(verify, false);
  verify->add_option("--backend", o.backend, "exact or fd");
  verify
      ->add_option("--margin", o.margin,
                   "Measurement window margin: skip nodes closer than this to the "
                   "domain boundary or to the printed degeneracy set of the normal "
                   "field (default 0 exact, 0.25 fd)")
      ->each([&](const std::string&) { o.margin_set = true; });
  verify
      ->add_option("--tol", o.tol,
                   "Maximum allowed reconstruction error over the window "
                   "(default 1e-8 exact, 1e-4 fd)")
      ->each([&](const std::string&) { o.tol_set = true; });

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (sample->parsed()) return cmd_sample(o);
    if (recover->parsed()) return cmd_recover(o);
    if (limit->parsed()) return cmd_limit(o);
    if (perturb->parsed()) return cmd_perturb(o);
    if (mesh->parsed()) return cmd_mesh(o);
    if (verify->parsed()) return cmd_verify(o);
    return kExitBadConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::UnknownExample& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::StageRequired& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::StageNotApplicable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::DimensionUnsupported& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::NoPrintedCoefficients& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const frontal::IOError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace frontal_cli
