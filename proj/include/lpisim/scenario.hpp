#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpisim/constants.hpp"
#include "lpisim/ephemeris.hpp"
#include "lpisim/kinematics.hpp"
#include "lpisim/link_model.hpp"
#include "lpisim/spin_weak.hpp"

namespace lpisim {

enum class Mode { RedshiftPass, AlphaForecast, FringeDemo, WeakValueScan, Constants };

std::string_view to_string(Mode mode);

struct OrbitSpec {
  std::optional<CircularOrbit> analytic;
  std::optional<std::filesystem::path> ephemeris_file;  // resolved against the config directory
  CpfEpoch ephemeris_epoch;  // scenario time zero
  std::size_t interpolation_nodes = 8;
};

struct PassSpec {
  double start = -250.0;  // s
  double end = 250.0;     // s
  int epochs = 100;
  double elevation_mask = 10.0 * constants::kPi / 180.0;  // rad
};

struct NoiseSpec {
  std::uint64_t photon_budget = 0;  // pulses per terminal per epoch
  double efficiency_sc = 1.0;
  double efficiency_gs = 1.0;
  double dark_probability = 0.0;
  double visibility = 1.0;
  int scan_points = 8;
  int trials = 100;
  double orbit_timing_error = 0.0;  // s, analysis-side spacecraft timing error
};

struct FringeSpec {
  double phase = 0.0;  // rad
  std::uint64_t n_per_point = 1000000;
  int points = 16;
};

struct SpinSpec {
  SpinCouplingParams params;
  int observable_axis = 3;
  std::string pre_system = "+";
  std::string pre_meter = "0";
  std::string post_meter = "0";
  double theta_start = 0.0;  // rad
  double theta_stop = 0.0;   // rad
  int theta_count = 1;
  std::vector<double> q_over_width{1e-3};
  double meter_width = 1.0;
};

struct ScenarioConfig {
  Mode mode = Mode::Constants;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "out";
  OrbitSpec orbit;
  GroundStation station;
  OpticalConfig optical = OpticalConfig::from_wavelength(800e-9, 6e3);
  PassSpec pass;
  RedshiftParams redshift;
  NoiseSpec noise;
  FringeSpec fringe;
  SpinSpec spin;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Collects every violation (no fail-fast). Throws FileUnreadable when the
/// file cannot be read.
ValidationReport validate_config(const std::filesystem::path& path);

/// Validates YAML text; relative paths resolve against `base_dir`.
ValidationReport validate_config_text(std::string_view yaml,
                                      const std::filesystem::path& base_dir = ".");

/// Parses and validates; throws ConfigInvalid listing every violation.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig load_config_text(std::string_view yaml,
                                const std::filesystem::path& base_dir = ".");

struct StepStatus {
  std::string name;
  bool ok = true;
  std::string message;
};

struct RunOutcome {
  int exit_code = 0;  // 0 success, 3 runtime failure of a required step
  std::filesystem::path results_file;
  std::filesystem::path summary_file;
  std::vector<StepStatus> steps;
};

/// Executes the mode's pipeline, writing results.tsv and summary.txt into
/// the output directory (created if needed).
RunOutcome run_scenario(const ScenarioConfig& config);

/// Config path entry point; `output_override` (non-empty) replaces the
/// configured output directory.
RunOutcome run_scenario(const std::filesystem::path& config_path,
                        const std::filesystem::path& output_override = {});

/// Header plus one row per constant (name, unit, value, reference, rel. deviation).
std::string format_constants_table();

}  // namespace lpisim
