#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfac/history.hpp"
#include "tfac/schemes.hpp"
#include "tfac/space_disc.hpp"

namespace tfac {

struct MeshConfig {
  std::string type = "uniform";  // uniform | graded | composite | adaptive
  double T = 1.0;
  /// Step count; for composite and adaptive meshes, the graded steps on [0, t_switch].
  std::size_t N = 100;
  /// Grading exponent; composite and adaptive heads default to min(1+a, 2-a)/a.
  std::optional<double> gamma;
  double t_switch = 0.1;
  /// Uniform step of the composite tail.
  double tau = 0.01;
  double tau_min = 1e-5;
  double tau_max = 0.1;
  double adp_gain = 1e5;
};

struct SchemeConfig {
  SchemeType type = SchemeType::pc;
  SchemeMode mode = SchemeMode::fast;
  double soe_tol = 1e-10;
  /// SOE cutoff; defaults to the smallest step the run can take.
  std::optional<double> soe_delta;
  DirectEvaluation direct = DirectEvaluation::automatic;
};

struct InitConfig {
  std::string type = "random_uniform";  // random_uniform | manufactured | constant
  double amplitude = 1e-3;
  std::uint64_t seed = 0;
  double mu = 0.5;
  double value = 0.0;
};

struct OutputConfig {
  /// Output directory; empty disables all file output.
  std::string dir;
  std::string csv_path = "energy.csv";
  std::size_t log_every = 1;
  std::size_t snapshot_every = 0;
  std::vector<double> snapshot_times = {1.0, 10.0, 20.0, 50.0, 100.0};
  std::string snapshot_format = "vtk";  // vtk | raw | both | none
  std::string summary_path = "summary.json";
};

struct RunConfig {
  ModelParams model;
  std::string potential = "double_well";
  GridSpec grid{2, 64, 2.0};
  MeshConfig mesh;
  SchemeConfig scheme;
  std::string source = "none";  // none | manufactured
  InitConfig init;
  OutputConfig output;
};

/// Parses the JSON form; absent keys keep their defaults, unknown keys and
/// invalid values raise invalid_argument naming the key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Canonical JSON (sorted keys, every field present).
std::string to_json(const RunConfig& config);

/// FNV-1a 64-bit hash of `text` as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// FNV-1a 64-bit hash of the canonical JSON without the output section, as
/// 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace tfac
