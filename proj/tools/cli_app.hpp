#pragma once

// Config parsing and the subcommands of the `weylsheet` executable.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weylsheet/congruence.hpp"
#include "weylsheet/estimates.hpp"
#include "weylsheet/surface.hpp"
#include "weylsheet/variational.hpp"
#include "weylsheet/weyl.hpp"

namespace weylsheet::cli {

using nlohmann::json;

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

struct ChartSpec {
  std::optional<std::array<double, 2>> u1, u2;
  std::optional<std::array<int, 2>> n;
  std::optional<std::array<bool, 2>> periodic;
};

struct SurfaceSpec {
  enum class Kind { Catalog, Expression, Grid };
  Kind kind = Kind::Catalog;
  std::string name;  // catalog name
  CatalogParams params;
  std::string expression;
  std::filesystem::path grid;
};

struct ThermalSpec {
  double r = 0.0;
  /// Dirichlet data as an expression in u1, u2; zero when empty.
  std::string boundary;
  std::optional<ThermalProfile> profile;
  /// Temperature at which l(θ) is evaluated for ν; defaults to θ0.
  std::optional<double> theta;
  int max_iterations = 0;
};

struct CongruenceSpec {
  std::string name;  // catalog entry, or empty when `field` is set
  std::map<std::string, double> params;
  std::array<std::string, 3> field;
  Vector3d lo = -Vector3d::Ones(), hi = Vector3d::Ones();
  /// Probe parameters (u1, u2); an interior 5x5 lattice of nodes when empty.
  std::vector<Vector2d> probes;
  double l_theta = 1.0;
  /// Thermal state vector in parameter space for the flat-state report.
  std::optional<std::array<std::string, 2>> flat_v;
  double flat_r = 0.0;
};

struct EnergySpec {
  std::string density = "willmore";
  std::optional<Region> region;
};

struct Tolerances {
  double solver = 0.0;  // 0: automatic
  double developability = 1e-8;
  double flat_state = 1e-6;
};

struct RunConfig {
  std::optional<SurfaceSpec> surface;
  ChartSpec chart;
  int signature = 1;
  std::optional<ThermalSpec> thermal;
  std::optional<CongruenceSpec> congruence;
  std::optional<EnergySpec> energy;
  std::filesystem::path out_dir = ".";
  Tolerances tolerances;
};

/// Relative paths in the document resolve against `base`. Throws ConfigError.
RunConfig parse_config(const json& doc, const std::filesystem::path& base = ".");
RunConfig load_config(const std::filesystem::path& path);

/// The sampled surface the config describes; analytic sources stay attached.
SampledSurface build_surface(const RunConfig& config);

/// Each command writes its files into config.out_dir and returns the summary
/// that is also printed on stdout.
json cmd_curvature(const RunConfig& config);
json cmd_thermal(const RunConfig& config);
json cmd_congruence(const RunConfig& config);
json cmd_energy(const RunConfig& config);
json cmd_export_obj(const RunConfig& config, bool with_grid);

struct EstimateArgs {
  MaterialConstants material;
  double r = 750.0;            // flake radius, nm
  std::optional<double> l;     // sheet length for the critical strain, nm
};
json cmd_estimate(const EstimateArgs& args);

/// Full command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// JSON text as written to report files: two-space indent, trailing newline.
std::string dump(const json& j);

}  // namespace weylsheet::cli
