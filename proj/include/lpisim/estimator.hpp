#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lpisim/interferometer.hpp"
#include "lpisim/kinematics.hpp"
#include "lpisim/link_model.hpp"

namespace lpisim {

struct PhaseMeasurement {
  Real phi_sc = 0;        // rad, unwrapped
  double sigma_sc = 1.0;  // rad
  Real phi_gs = 0;
  double sigma_gs = 1.0;
};

struct PassDataset {
  std::vector<double> epochs;  // s
  std::vector<LinkGeometry> geometries;
  std::vector<PhaseMeasurement> measurements;
};

struct AlphaEstimate {
  double alpha_hat = 0.0;
  double sigma_alpha = 0.0;
  double chi2_per_dof = 0.0;
  std::size_t dof = 0;
};

/// Forms S = phi_sc - phi_gs / 2 per epoch, removes the modeled second-order
/// kinematic terms using the dataset geometry, and fits the remainder to
/// (1 + alpha) omega0 tau_l (U2 - U1) by weighted least squares.
/// Throws SingularFit when every U2 - U1 vanishes, InsufficientData for fewer
/// than two epochs, InvalidArgument for inconsistent inputs.
AlphaEstimate estimate_alpha(const PassDataset& data, const OpticalConfig& cfg);

/// How synthetic phases are generated.
enum class SignalModel {
  Exact,     // full frequency ratios
  Expanded,  // phi_gs exact, phi_sc chosen so that S follows the second-order expansion
};

/// Noisy phases for the given geometries: Gaussian noise of `phase_noise`
/// rad on each terminal (0 for noiseless data).
PassDataset synthesize_dataset(const std::vector<LinkGeometry>& geometries,
                               const OpticalConfig& cfg, const RedshiftParams& truth,
                               double phase_noise, std::uint64_t seed,
                               SignalModel model = SignalModel::Exact);

/// Link geometries for emissions at `epochs`.
std::vector<LinkGeometry> sweep_geometries(const Trajectory& station, const Trajectory& spacecraft,
                                           const std::vector<double>& epochs);

struct ForecastScenario {
  std::vector<double> epochs;
  std::vector<LinkGeometry> geometries;
  /// Geometry the analysis believes (orbit-knowledge perturbation); empty
  /// means perfect knowledge.
  std::vector<LinkGeometry> model_geometries;
  OpticalConfig optical;
  RedshiftParams truth;
  double visibility = 1.0;
  CountingModel counting_sc;
  CountingModel counting_gs;
  std::vector<double> scan_offsets = uniform_offsets(8);
  bool noise_free = false;
};

struct TrialResult {
  std::uint64_t seed = 0;
  AlphaEstimate estimate;
};

struct ForecastResult {
  double sigma_alpha_empirical = 0.0;
  double sigma_alpha_analytic = 0.0;
  double mean_alpha_hat = 0.0;
  double mean_chi2_per_dof = 0.0;
  double mean_sigma_phi_sc = 0.0;
  double mean_sigma_phi_gs = 0.0;
  std::vector<TrialResult> trials;  // ordered by trial index
};

/// Runs the full pipeline `trials` times: link phases, fringe scans at both
/// terminals with `photon_budget` pulses per terminal per epoch, phase fits
/// unwrapped against the geometric prediction, then estimate_alpha.
/// Trials run in parallel and are folded in seed order.
ForecastResult precision_forecast(const ForecastScenario& scenario, std::uint64_t photon_budget,
                                  int trials, std::uint64_t seed);

/// Photon budget at which sigma_alpha reaches `target`, extrapolated with
/// the 1/sqrt(N) shot-noise law from one forecast.
double budget_for_sigma(double sigma_alpha, double photon_budget, double target);

/// Per-terminal phase noise (equal at both ends) that gives sigma_alpha =
/// `target` over the scenario's epochs.
double required_phase_sigma(const ForecastScenario& scenario, double target);

/// Per-trial seed derived from the run seed (splitmix64 of seed + index).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

/// Columnar text: header, one row per trial (seed, alpha_hat, sigma_alpha,
/// chi2_per_dof), then a summary row.
std::string format_trials(const ForecastResult& result);

}  // namespace lpisim
