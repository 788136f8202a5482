// Command-line front end: regime validation, field maps (CSV + PGM),
// cross-engine comparison tables and qubit decoherence reports.
//
// Exit codes: 0 success, 1 validation failure, 2 parse/usage error,
// 3 numerical domain error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ewjn/ewjn.hpp"

namespace {

using namespace ewjn;

int parse_component(char c) {
  if (c == 'x') return 0;
  if (c == 'y') return 1;
  if (c == 'z') return 2;
  throw CLI::ValidationError("--quantity", "component must be x, y or z");
}

MapJob::Quantity parse_quantity(const std::string& q, int& i, int& j) {
  const auto us = q.find('_');
  if (us == std::string::npos || q.size() != us + 3)
    throw CLI::ValidationError(
        "--quantity", "expected F_ij, Fr6_ij or NCF_ij (e.g. F_zz)");
  i = parse_component(q[us + 1]);
  j = parse_component(q[us + 2]);
  const std::string base = q.substr(0, us);
  if (base == "F") return MapJob::Quantity::f;
  if (base == "Fr6") return MapJob::Quantity::f_r6;
  if (base == "NCF") return MapJob::Quantity::ncf;
  throw CLI::ValidationError("--quantity", "unknown quantity '" + base + "'");
}

double reference_radius(const Scene& scene) {
  return object_bounding_radius(scene.objects.front());
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

int cmd_validate(const std::string& config_path, const std::string& points_path) {
  const ParsedScene parsed = parse_config_file(config_path);
  std::vector<Vec3> points;
  if (!points_path.empty()) {
    const double a = reference_radius(parsed.scene);
    for (const auto& row : read_numeric_lines(points_path, a)) {
      if (row.size() != 3)
        throw std::runtime_error("points file: expected 3 values per line");
      points.emplace_back(row[0], row[1], row[2]);
    }
  }
  const RegimeReport rep = validate_regime(parsed.scene, points);
  for (const auto& line : rep.lines()) std::cout << line << "\n";
  return rep.status == RegimeStatus::fail ? 1 : 0;
}

int cmd_map(const std::string& config_path, const std::string& quantity,
            const std::string& mode, const std::string& src,
            const std::string& engine, int L, int resolution,
            const std::string& out_prefix, double extent, int samples,
            double mask, const std::string& plane, double offset) {
  const ParsedScene parsed = parse_config_file(config_path);

  MapJob job;
  job.quantity = parse_quantity(quantity, job.i, job.j);
  if (mode == "local") {
    job.mode = MapJob::Mode::local;
  } else if (mode == "nonlocal") {
    job.mode = MapJob::Mode::nonlocal;
    if (src.empty())
      throw CLI::ValidationError("--src", "required in nonlocal mode");
    job.src = parse_point(src, reference_radius(parsed.scene));
  } else {
    throw CLI::ValidationError("--mode", "expected local or nonlocal");
  }
  if (engine == "multipole")
    job.engine = MapJob::Engine::multipole;
  else if (engine == "integral")
    job.engine = MapJob::Engine::integral;
  else
    throw CLI::ValidationError("--engine", "expected multipole or integral");
  job.L = L > 0 ? L : parsed.defaults.L;
  job.resolution = resolution > 0 ? resolution : parsed.defaults.resolution;

  GridSpec grid;
  grid.extent = extent;
  grid.samples = samples;
  grid.mask_radius = mask;
  grid.offset = offset;
  if (plane == "x")
    grid.normal_axis = 0;
  else if (plane == "y")
    grid.normal_axis = 1;
  else if (plane == "z")
    grid.normal_axis = 2;
  else
    throw CLI::ValidationError("--plane", "expected x, y or z");

  const MapResult res = run_map(parsed.scene, job, grid);
  write_map_csv(res, out_prefix + ".csv");
  write_map_pgm(res, out_prefix + ".pgm");
  std::cout << "wrote " << out_prefix << ".csv and " << out_prefix << ".pgm\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& points_path,
                int L, int resolution, const std::string& out_path) {
  const ParsedScene parsed = parse_config_file(config_path);
  const double a = reference_radius(parsed.scene);
  std::vector<std::pair<Vec3, Vec3>> pairs;
  for (const auto& row : read_numeric_lines(points_path, a)) {
    if (row.size() != 6)
      throw std::runtime_error(
          "points file: expected 6 values per line (x1,y1,z1,x2,y2,z2)");
    pairs.push_back({Vec3(row[0], row[1], row[2]), Vec3(row[3], row[4], row[5])});
  }
  const CompareResult res =
      run_compare(parsed.scene, pairs, L > 0 ? L : parsed.defaults.L,
                  resolution > 0 ? resolution : parsed.defaults.resolution);
  std::ofstream file;
  write_compare_csv(res, open_or_stdout(out_path, file));
  return 0;
}

int cmd_report(const std::string& config_path, const std::string& qubits_path,
               const std::string& field, int L, int resolution,
               const std::string& out_path) {
  const ParsedScene parsed = parse_config_file(config_path);
  const double a = reference_radius(parsed.scene);
  std::vector<Vec3> qubits;
  for (const auto& row : read_numeric_lines(qubits_path, a)) {
    if (row.size() != 3)
      throw std::runtime_error("qubits file: expected 3 values per line");
    qubits.emplace_back(row[0], row[1], row[2]);
  }
  FieldPolicy policy;
  if (field == "optimal") {
    policy.optimal = true;
  } else {
    policy.optimal = false;
    if (field == "x")
      policy.fixed = Vec3::UnitX();
    else if (field == "y")
      policy.fixed = Vec3::UnitY();
    else if (field == "z")
      policy.fixed = Vec3::UnitZ();
    else
      policy.fixed = parse_point(field, 1.0).normalized();
  }
  const DecoherenceReport rep =
      run_report(parsed.scene, qubits, policy, L > 0 ? L : parsed.defaults.L,
                 resolution > 0 ? resolution : parsed.defaults.resolution);
  std::ofstream file;
  write_report_csv(rep, open_or_stdout(out_path, file));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Magnetic Johnson-noise correlation tensors near small metal objects"};
  app.require_subcommand(1);

  std::string config, points, quantity = "F_zz", mode = "local", src, out;
  std::string engine = "multipole", field = "optimal", plane = "y";
  int L = 0, resolution = 0, samples = 220;
  double extent = 5.5, mask = 1.05, offset = 0.0;

  auto* validate = app.add_subcommand("validate", "check the quasistatic regime");
  validate->add_option("config", config, "scene config (JSON)")->required();
  validate->add_option("--points", points, "optional query points file");

  auto* map = app.add_subcommand("map", "sample a tensor component on a plane");
  map->add_option("config", config)->required();
  map->add_option("--quantity", quantity, "F_ij | Fr6_ij | NCF_ij");
  map->add_option("--mode", mode, "local | nonlocal");
  map->add_option("--src", src, "fixed x' for nonlocal mode, e.g. 0,0,2a");
  map->add_option("--engine", engine, "multipole | integral");
  map->add_option("--L", L, "multipole truncation");
  map->add_option("--resolution", resolution, "voxels per diameter");
  map->add_option("--out", out, "output prefix (.csv/.pgm)")->required();
  map->add_option("--extent", extent, "half-width in units of a");
  map->add_option("--samples", samples, "samples per axis");
  map->add_option("--mask", mask, "mask radius in units of a");
  map->add_option("--plane", plane, "normal axis: x | y | z");
  map->add_option("--offset", offset, "plane offset in units of a");

  auto* compare = app.add_subcommand("compare", "multipole vs integral table");
  compare->add_option("config", config)->required();
  compare->add_option("--points", points, "pairs file (x1,y1,z1,x2,y2,z2)")
      ->required();
  compare->add_option("--L", L);
  compare->add_option("--resolution", resolution);
  compare->add_option("--out", out, "output CSV (default stdout)");

  auto* report = app.add_subcommand("report", "qubit decoherence report");
  report->add_option("config", config)->required();
  report->add_option("--qubits", points, "positions file (x,y,z)")->required();
  report->add_option("--field", field, "optimal | x | y | z | nx,ny,nz");
  report->add_option("--L", L);
  report->add_option("--resolution", resolution);
  report->add_option("--out", out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
    if (validate->parsed()) return cmd_validate(config, points);
    if (map->parsed())
      return cmd_map(config, quantity, mode, src, engine, L, resolution, out,
                     extent, samples, mask, plane, offset);
    if (compare->parsed()) return cmd_compare(config, points, L, resolution, out);
    if (report->parsed()) return cmd_report(config, points, field, L, resolution, out);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ewjn::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
