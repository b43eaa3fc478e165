#include <catch2/catch_amalgamated.hpp>

#include <frontal/frontal.hpp>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using frontal::GridField;
using frontal::LegendreData;

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "frontal_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Run the packaged executable and capture exit code plus the key=value rows
// it prints on stdout.
struct CliResult {
  int exit_code = -1;
  std::map<std::string, std::string> rows;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(FRONTAL_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  CliResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t eq = line.find('=');
    if (eq != std::string::npos)
      res.rows[line.substr(0, eq)] = line.substr(eq + 1);
  }
  res.err = slurp(err);
  return res;
}

double row_as_double(const CliResult& r, const std::string& key) {
  REQUIRE(r.rows.count(key) == 1);
  return std::stod(r.rows.at(key));
}

long row_as_long(const CliResult& r, const std::string& key) {
  REQUIRE(r.rows.count(key) == 1);
  return std::stol(r.rows.at(key));
}

// Vertex lines of an OBJ file, in emission order.
std::vector<Eigen::Vector3d> obj_vertices(const fs::path& p) {
  std::vector<Eigen::Vector3d> verts;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) != 0) continue;
    std::istringstream is(line.substr(2));
    Eigen::Vector3d v;
    is >> v[0] >> v[1] >> v[2];
    verts.push_back(v);
  }
  return verts;
}

std::size_t obj_face_count(const fs::path& p) {
  std::size_t faces = 0;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("f ", 0) == 0) ++faces;
  return faces;
}

Eigen::VectorXd node_point(const GridField& g, std::size_t flat) {
  std::vector<int> idx(static_cast<std::size_t>(g.dimension()));
  g.unflatten(flat, idx);
  return g.point_at(idx);
}

}  // namespace

TEST_CASE("data files round trip byte for byte", "[io]") {
  const frontal::GalleryEntry& entry = frontal::lookup("crosscap");
  const std::vector<std::vector<double>> axes = {frontal::make_axis(-1.0, 1.0, 9),
                                                 frontal::make_axis(-1.0, 1.0, 9)};
  const LegendreData sampled = frontal::sample_data(
      frontal::legendre_data_of(entry), axes, entry.map_singular_residual);
  REQUIRE_FALSE(sampled.analytic_mode());
  REQUIRE(sampled.mask.size() == 81);
  int masked = 0;  // mask bit 1 marks a usable node, 0 a masked one
  for (std::uint8_t m : sampled.mask) masked += m ? 0 : 1;
  CHECK(masked == 1);  // the origin node

  const fs::path p1 = work_dir() / "roundtrip_1.json";
  const fs::path p2 = work_dir() / "roundtrip_2.json";
  frontal::write_legendre_data(p1.string(), sampled);
  const LegendreData back = frontal::read_legendre_data(p1.string());
  frontal::write_legendre_data(p2.string(), back);
  CHECK(slurp(p1) == slurp(p2));

  CHECK(back.n == sampled.n);
  CHECK(back.mask == sampled.mask);
  CHECK(back.nu_grid.values == sampled.nu_grid.values);
  CHECK(back.a_grid.values == sampled.a_grid.values);

  CHECK_THROWS_AS(frontal::read_legendre_data((work_dir() / "absent.json").string()),
                  frontal::IOError);

  // A stale format version is rejected outright.
  nlohmann::ordered_json j = frontal::legendre_data_to_json(sampled);
  j["version"] = 99;
  const fs::path p3 = work_dir() / "roundtrip_stale.json";
  std::ofstream(p3) << j.dump();
  CHECK_THROWS_AS(frontal::read_legendre_data(p3.string()), frontal::IOError);
}

TEST_CASE("mesh statistics match the emitted file", "[io]") {
  GridField grid;
  grid.axes = {frontal::make_axis(0.0, 2.0, 3), frontal::make_axis(0.0, 1.0, 2)};
  grid.values_per_node = 3;
  grid.values.resize(grid.node_count() * 3);
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    const Eigen::VectorXd p = node_point(grid, flat);
    Eigen::Vector3d v(p[0], p[1], p[0] + p[1]);
    grid.set_value(flat, v);
  }

  const fs::path full = work_dir() / "mesh_full.obj";
  const frontal::MeshStats st = frontal::write_mesh_obj(full.string(), grid);
  CHECK(st.vertices == 6);
  CHECK(st.faces == 4);  // two quads, two triangles each
  CHECK(obj_vertices(full).size() == st.vertices);
  CHECK(obj_face_count(full) == st.faces);

  // Dropping a corner removes its vertex and the one quad that touches it.
  std::vector<std::uint8_t> keep(grid.node_count(), 1);
  keep[0] = 0;
  const fs::path cut = work_dir() / "mesh_cut.obj";
  const frontal::MeshStats st2 = frontal::write_mesh_obj(cut.string(), grid, keep);
  CHECK(st2.vertices == 5);
  CHECK(st2.faces == 2);
  CHECK(obj_vertices(cut).size() == 5);
  CHECK(obj_face_count(cut) == 2);

  std::vector<std::uint8_t> wrong(3, 1);
  CHECK_THROWS_AS(frontal::write_mesh_obj((work_dir() / "x.obj").string(), grid, wrong),
                  frontal::ConfigError);

  GridField curve;
  curve.axes = {frontal::make_axis(0.0, 1.0, 4)};
  curve.values_per_node = 2;
  curve.values.assign(8, 0.0);
  CHECK_THROWS_AS(frontal::write_mesh_obj((work_dir() / "y.obj").string(), curve),
                  frontal::DimensionUnsupported);
}

TEST_CASE("sign alignment repairs flipped rows", "[io]") {
  // A smooth unit field along one axis, then deliberate sign flips on a
  // middle stretch. Alignment restores the original bit for bit, because
  // flipping is an exact negation and the first node is left untouched.
  GridField nu;
  nu.axes = {frontal::make_axis(0.0, 1.0, 9)};
  nu.values_per_node = 2;
  nu.values.resize(18);
  GridField a = nu;
  a.values_per_node = 1;
  a.values.resize(9);
  for (std::size_t k = 0; k < 9; ++k) {
    const double t = nu.axes[0][k];
    Eigen::Vector2d v(std::cos(t), std::sin(t));
    nu.set_value(k, v);
    a.values[k] = 0.25 * t;
  }
  GridField nu_flipped = nu;
  GridField a_flipped = a;
  for (std::size_t k = 3; k <= 5; ++k) {
    Eigen::VectorXd v = -nu_flipped.value_at(k);
    nu_flipped.set_value(k, v);
    a_flipped.values[k] = -a_flipped.values[k];
  }
  frontal::align_legendre_signs(nu_flipped, a_flipped);
  CHECK(nu_flipped.values == nu.values);
  CHECK(a_flipped.values == a.values);

  GridField short_a = a;
  short_a.values.resize(5);
  CHECK_THROWS_AS(frontal::align_legendre_signs(nu, short_a), frontal::ConfigError);
}

TEST_CASE("command line sampling matches the closed forms", "[cli]") {
  const fs::path out = work_dir() / "ce_stage4.json";
  const CliResult r = run_cli("sample --example cuspidal_edge --stage 4 --grid -1:1:9,-1:1:9 --out " +
                              out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(row_as_long(r, "nodes") == 81);
  CHECK(row_as_long(r, "masked") == 9);  // the y = 0 row

  const LegendreData data = frontal::read_legendre_data(out.string());
  const frontal::GalleryEntry& entry = frontal::lookup("cuspidal_edge");
  const frontal::DifferentiableMap a4 = entry.a_closed(4);
  const frontal::DifferentiableMap nu4 = entry.nu_closed(4);
  for (std::size_t flat : {std::size_t{0}, std::size_t{10}, std::size_t{20},
                           std::size_t{50}, std::size_t{80}}) {
    REQUIRE(data.mask[flat] == 1);  // off the masked y = 0 row
    const Eigen::VectorXd x = node_point(data.nu_grid, flat);
    CHECK(std::abs(data.a_grid.value_at(flat)[0] - a4(x)[0]) < 1e-15);
    CHECK((data.nu_grid.value_at(flat) - nu4(x)).cwiseAbs().maxCoeff() < 1e-15);
  }

  const CliResult c = run_cli("sample --example constant --stage 10 --grid -2:2:5,-2:2:5 --out " +
                              (work_dir() / "const.json").string());
  REQUIRE(c.exit_code == 0);
  CHECK(row_as_long(c, "masked") == 0);
}

TEST_CASE("identical configurations produce identical files", "[cli]") {
  const fs::path p1 = work_dir() / "det_1.json";
  const fs::path p2 = work_dir() / "det_2.json";
  // An even node count keeps the origin off the grid: the quadratic
  // construction never regularizes the cross-cap point itself (the second
  // input column of the differential vanishes identically there), so a node
  // on it would block the regular-fraction bar no matter the draw.
  const std::string args = "perturb --example crosscap --grid -1:1:8,-1:1:8 --seed 99 --out ";
  REQUIRE(run_cli(args + p1.string()).exit_code == 0);
  REQUIRE(run_cli(args + p2.string()).exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("grid recovery through the executable", "[cli]") {
  const CliResult r =
      run_cli("recover --example constant --stage 10 --grid -2:2:5,-2:2:5");
  REQUIRE(r.exit_code == 0);
  CHECK(row_as_long(r, "unresolved") == 0);
  CHECK(row_as_long(r, "regular") + row_as_long(r, "extended") +
            row_as_long(r, "unresolved") ==
        row_as_long(r, "nodes"));
  CHECK(row_as_double(r, "max_error") < 1e-10);
}

TEST_CASE("double limits through the executable", "[cli]") {
  const CliResult ce = run_cli("limit --example cuspidal_edge --point 0,0");
  REQUIRE(ce.exit_code == 0);
  CHECK(row_as_double(ce, "max_error") < 1e-6);
  CHECK(ce.rows.at("target") == "0,0,0");

  const CliResult sw = run_cli("limit --example swallowtail --point 1,1");
  REQUIRE(sw.exit_code == 0);
  CHECK(row_as_double(sw, "max_error") < 1e-6);
  CHECK(sw.rows.at("target") == "1,3,4");

  const CliResult d4 = run_cli("limit --example d4plus --point 1,1,1");
  REQUIRE(d4.exit_code == 0);
  CHECK(row_as_double(d4, "max_error") < 1e-6);
  CHECK(d4.rows.at("target") == "1,1,6,5");
}

TEST_CASE("mesh output through the executable", "[cli]") {
  const fs::path obj = work_dir() / "ce.obj";
  const CliResult r = run_cli("mesh --example cuspidal_edge --stage 4 --grid -1:1:15,-1:1:15 --out " +
                              obj.string());
  REQUIRE(r.exit_code == 0);
  CHECK(row_as_long(r, "vertices") == 225 - 15);
  CHECK(row_as_long(r, "faces") == (14 * 14 - 2 * 14) * 2);
  CHECK(obj_vertices(obj).size() == 210);
  CHECK(obj_face_count(obj) == 336);

  // On the example path vertices are exact map values, in kept-node order.
  const fs::path cc = work_dir() / "cc.obj";
  const CliResult r2 =
      run_cli("mesh --example crosscap --grid -1:1:9,-1:1:9 --out " + cc.string());
  REQUIRE(r2.exit_code == 0);
  CHECK(row_as_long(r2, "vertices") == 80);  // all but the origin node
  const std::vector<Eigen::Vector3d> verts = obj_vertices(cc);
  REQUIRE(verts.size() == 80);
  const std::vector<double> axis = frontal::make_axis(-1.0, 1.0, 9);
  std::size_t v = 0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      const double x = axis[static_cast<std::size_t>(i)];
      const double y = axis[static_cast<std::size_t>(j)];
      if (x == 0.0 && y == 0.0) continue;  // masked
      const Eigen::Vector3d expect(x, y * y, x * y);
      CHECK((verts[v] - expect).cwiseAbs().maxCoeff() < 1e-12);
      ++v;
    }
  }

  CHECK(run_cli("mesh --example cusp --out " + (work_dir() / "c.obj").string())
            .exit_code == 4);
  CHECK(run_cli("mesh --example d4plus --stage 1 --out " + (work_dir() / "d.obj").string())
            .exit_code == 4);
}

TEST_CASE("sampled files feed the finite difference backend", "[cli]") {
  const fs::path data = work_dir() / "cc21.json";
  const CliResult s =
      run_cli("sample --example crosscap --grid -1:1:21,-1:1:21 --out " + data.string());
  REQUIRE(s.exit_code == 0);
  CHECK(row_as_long(s, "nodes") == 441);
  CHECK(row_as_long(s, "masked") == 1);

  const fs::path rec = work_dir() / "cc21rec.json";
  const CliResult r =
      run_cli("recover --input " + data.string() + " --backend fd --out " + rec.string());
  REQUIRE(r.exit_code == 0);
  CHECK(row_as_long(r, "unresolved") == 0);
  CHECK(row_as_long(r, "extended") == 21);  // the y = 0 line
  CHECK(row_as_double(r, "max_height_residual") < 1e-3);

  nlohmann::ordered_json j = nlohmann::ordered_json::parse(slurp(rec));
  CHECK(j.at("counts").at("regular").get<int>() == 420);
  CHECK(j.at("counts").at("unresolved").get<int>() == 0);

  // Meshing the same file keeps every resolved node. Away from the domain
  // boundary and the degenerate line the vertices track the map that
  // produced the data; the bound reflects second order differences on a
  // coarse step of 0.1.
  const fs::path obj = work_dir() / "cc21.obj";
  const CliResult m =
      run_cli("mesh --input " + data.string() + " --out " + obj.string());
  REQUIRE(m.exit_code == 0);
  CHECK(row_as_long(m, "vertices") == 441);
  const std::vector<Eigen::Vector3d> verts = obj_vertices(obj);
  REQUIRE(verts.size() == 441);
  const std::vector<double> axis = frontal::make_axis(-1.0, 1.0, 21);
  double worst = 0.0;
  for (int i = 0; i < 21; ++i) {
    for (int j2 = 0; j2 < 21; ++j2) {
      const double x = axis[static_cast<std::size_t>(i)];
      const double y = axis[static_cast<std::size_t>(j2)];
      const std::size_t flat = static_cast<std::size_t>(i) * 21 +
                               static_cast<std::size_t>(j2);
      if (std::abs(y) < 0.25) continue;
      if (std::min(1.0 - std::abs(x), 1.0 - std::abs(y)) < 0.25) continue;
      const Eigen::Vector3d expect(x, y * y, x * y);
      worst = std::max(worst, (verts[flat] - expect).cwiseAbs().maxCoeff());
    }
  }
  CHECK(worst < 0.02);
}

TEST_CASE("configuration errors exit with the usage code", "[cli]") {
  CHECK(run_cli("sample --example klein_bottle --out " + (work_dir() / "k.json").string())
            .exit_code == 4);
  CHECK(run_cli("recover --input " + (work_dir() / "no_such.json").string() +
                " --backend fd")
            .exit_code == 4);
  // File input implies the sampled backend and carries its own grid.
  const fs::path data = work_dir() / "cc21.json";
  CHECK(run_cli("recover --input " + data.string()).exit_code == 4);
  CHECK(run_cli("recover --input " + data.string() + " --backend fd --grid -1:1:5,-1:1:5")
            .exit_code == 4);
  CHECK(run_cli("sample --example crosscap --grid 1:-1:5,-1:1:5 --out " +
                (work_dir() / "g.json").string())
            .exit_code == 4);
  CHECK(run_cli("recover --example crosscap --bogus").exit_code == 4);
  CHECK(run_cli("limit --example crosscap --point 0,0").exit_code == 4);
  CHECK(run_cli("limit --example cuspidal_edge").exit_code == 4);
  CHECK(run_cli("sample --example crosscap").exit_code == 4);

  const CliResult bad = run_cli("sample --example klein_bottle --out " +
                                (work_dir() / "k.json").string());
  CHECK(bad.err.find("error:") != std::string::npos);
}
