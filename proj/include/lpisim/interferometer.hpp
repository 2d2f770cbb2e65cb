#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lpisim {

/// Detection probabilities per sent photon in the three arrival-time windows
/// of one output port of the second interferometer.
struct PeakIntensities {
  double early = 0.0;    // short-short
  double central = 0.0;  // short-long and long-short, interfering
  double late = 0.0;     // long-long
};

/// Output port of the second interferometer. `Primary` is constructive for
/// the central peak at zero phase, `Complementary` destructive.
enum class OutputPort { Primary, Complementary };

/// Fraction of the input lost at the unused output of the first
/// interferometer. Together with both ports of the second one the cascade
/// accounts for all of the probability.
inline constexpr double kFirstInterferometerRejected = 0.5;

/// Balanced 50/50 splitters, amplitude 1/4 per path: side peaks 1/16 each,
/// central (1/8)(1 +- V cos phi).
PeakIntensities cascade_intensities(double phi, double visibility,
                                    OutputPort port = OutputPort::Primary);

struct DetectionHistogram {
  std::uint64_t counts_early = 0;
  std::uint64_t counts_central = 0;
  std::uint64_t counts_late = 0;
  std::uint64_t n_sent = 0;
  double phase_setting = 0.0;  // rad, scan offset applied at the terminal
};

struct CountingModel {
  double efficiency = 1.0;        // link x detector efficiency, [0, 1]
  double dark_probability = 0.0;  // background click probability per window per pulse
};

/// Counts for `n_sent` pulses. Each window's count is binomial with
/// probability intensity * efficiency + dark_probability; the three windows
/// are drawn jointly (multinomially) so their sum never exceeds n_sent.
DetectionHistogram simulate_counts(const PeakIntensities& intensities, std::uint64_t n_sent,
                                   const CountingModel& counting, std::uint64_t seed);

/// One histogram per offset, at total phase base_phase + offset. Needs at
/// least 4 offsets spanning at least pi (InsufficientScan otherwise).
std::vector<DetectionHistogram> fringe_scan(std::span<const double> offsets, double base_phase,
                                            double visibility, std::uint64_t n_per_point,
                                            const CountingModel& counting, std::uint64_t seed);

/// `count` offsets evenly spaced over [0, 2 pi).
std::vector<double> uniform_offsets(std::size_t count);

struct PhaseFit {
  double phi = 0.0;         // rad, in (-pi, pi]
  double sigma_phi = 0.0;   // rad
  double visibility = 0.0;
  double amplitude = 0.0;   // mean central counts A
  double chi2 = 0.0;
  std::vector<double> residuals;  // observed - model, central counts
};

/// Weighted least squares of central counts against A (1 + V cos(phi + offset)).
/// The model is linear in (A, A V cos phi, -A V sin phi), so the fit is solved
/// exactly with Poisson weights refined from the model prediction.
/// Throws FitDiverged or DegenerateVisibility (V < 0.05).
PhaseFit fit_phase(std::span<const DetectionHistogram> scan);

/// Phase standard deviation predicted from the Fisher information of the
/// same three-parameter model evaluated at the true fringe (Cramér-Rao bound).
double predicted_phase_sigma(double phi, double visibility, std::span<const double> offsets,
                             std::uint64_t n_per_point, const CountingModel& counting);

/// Columnar text: header then one row per scan point
/// (offset_rad, early, central, late, n_sent).
std::string format_histograms(std::span<const DetectionHistogram> scan);

/// Wraps to (-pi, pi].
double wrap_phase(double phi);

}  // namespace lpisim
