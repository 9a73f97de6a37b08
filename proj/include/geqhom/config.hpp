#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "geqhom/conditions.hpp"
#include "geqhom/fields.hpp"
#include "geqhom/gequation.hpp"
#include "geqhom/homogenize.hpp"

namespace geqhom {

using Json = nlohmann::json;

enum class ExperimentKind { field, trajectory, tau, wulff, geq, conditions, acceptance };

std::string_view to_string(ExperimentKind kind);

struct FieldDumpConfig {
  Vec2 center{};
  double half_width = 3.2;
  double h = 0.1;
};

struct TrajectoryConfig {
  Vec2 x0{};
  double T = 5.0;
  double dt = 0.01;
  int drift_sign = -1;
  double bound = 1.0;
  std::vector<double> starts{0.0};
  std::vector<Vec2> values{{0.0, 0.0}};
};

struct TauConfig {
  Vec2 source{};
  Vec2 target{1.0, 0.0};
  double h = 0.05;
  int stencil = 3;
  int drift_sign = -1;
  double bound = 1.0;
  double half_width = 0.0;  ///< 0: sized from |target - source| and grown until certified
  bool field_csv = false;
};

struct WulffConfig {
  std::vector<std::uint64_t> seeds;  ///< empty: the global seed
  int directions = 32;
  std::vector<double> radii{10, 20, 40};
  GridPolicy policy{};
  bool diagnostics = true;
  Vec2 diagnostic_direction{1.0, 0.0};
  Vec2 diagnostic_base{0.5, 0.5};
};

struct GeqConfig {
  std::vector<double> eps{0.25};
  InitialData u0 = InitialData::cosine({0.25, 0.0});
  double T = 1.0;
  int snapshots = 4;
  double h = 0.05;           ///< PDE lattice spacing
  double cfl = 0.5;
  double half_width = 0.0;   ///< 0: R + (1 + V_inf) T + 1
  bool error_table = true;
  double R = 4.0;
  HomogenizationOptions table{};
};

struct ConditionsConfig {
  std::vector<std::string> run;
  Vec2 z{};
  double M = 10.0;
  double K = 0.0;  ///< modified_stream hypothesis constant; 0 means hypothesis_K
  Lemma51Options lemma51{};
  int pairs = 50;
  std::vector<std::uint64_t> seeds;  ///< taubound seeds; empty: the global seed
  std::vector<double> radii{10, 20, 40, 80};
  GammaOptions gamma{};
  int gamma_samples = 20;
  double gamma_R = 10.0;
  int stream_samples = 200;
  double stream_r_max = 16.0;
  double stream_dr = 0.5;
  double stream_spacing = 0.05;
  int moment_samples = 4000;
  std::vector<double> sublinear_radii{10, 20, 40, 80};
  double sublinear_spacing = 0.1;
  Vec2 volume_x{};
  std::vector<double> volume_times{1, 2, 4};
  double volume_h = 0.05;
  double volume_tol = 0.05;
};

/// Pass/fail thresholds of the acceptance suite.
struct AcceptanceTolerances {
  double metric_rel = 0.02;
  double metric_seconds = 30.0;
  double drift_rel = 0.05;
  double trap_inner = 0.45;
  double trap_outer = 0.55;
  double shape_rel = 0.10;
  double shape_spread = 0.05;
  double disk_rel = 0.02;
  double algebra_rel = 1e-15;
  double isotropy = 0.05;
  double volume = 0.05;
  double homogenization_ratio = 0.6;
  double homogenization_seconds = 600.0;
  double cross_solver = 0.05;
  double taubound_flat = 0.2;
  double stream_integral = 12.0;
  double moment_sigmas = 3.0;
  double halving = 0.05;
  double lemma_slack = 1.1;
};

struct AcceptanceConfig {
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  AcceptanceTolerances tol{};
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::tau;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string out = "out";
  FieldSpec field = FieldSpec::zero();
  FieldDumpConfig dump;
  TrajectoryConfig trajectory;
  TauConfig tau;
  WulffConfig wulff;
  GeqConfig geq;
  ConditionsConfig conditions;
  AcceptanceConfig acceptance;

  /// Every effective value of the sections this experiment reads, defaults
  /// filled in. `out` and `jobs` are left out: they do not change results.
  Json echo;
  /// 16 hex digits of FNV-1a over echo.dump().
  std::string hash;
};

/// Parses JSON text; syntax errors become ConfigError("line L, column C", ...).
Json parse_config_text(std::string_view text);

/// Validates a parsed document against the schema in docs/config.md. Unknown
/// keys, wrong types and out-of-range values throw ConfigError naming the JSON
/// pointer of the offending field.
ExperimentConfig load_config(const Json& doc);

/// Compact field specs: "zero", "shear:A=2", "cellular:A=1,U1=0,U2=0",
/// "constant:v1=0.5,v2=0", "fourier:n=8,k=1,a=0.125,isotropic=1",
/// "trap:cutoff=2". Throws ConfigError with `where` = the given pointer.
Json field_from_compact(std::string_view text, const std::string& where);

/// Compact initial data: "cosine:k1=0.25,k2=0,a=1", "bump:c1=0,c2=0,r=1,a=1",
/// "disk:c1=0,c2=0,r=1,w=0.25,a=1", "constant:a=1".
Json initial_from_compact(std::string_view text, const std::string& where);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace geqhom
