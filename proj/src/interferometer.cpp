#include "lpisim/interferometer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"

namespace lpisim {

namespace c = constants;

namespace {

constexpr double kSidePeak = 1.0 / 16.0;
constexpr double kCentralMean = 1.0 / 8.0;
constexpr double kMinVisibility = 0.05;
constexpr int kReweightPasses = 6;

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("{} = {} outside [0, 1]", name, v));
  }
}

std::uint64_t draw_binomial(std::mt19937_64& rng, std::uint64_t n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::uint64_t> dist(n, p);
  return dist(rng);
}

struct LinearFringe {
  Eigen::Vector3d coef;  // (A, A V cos phi, -A V sin phi)
  Eigen::Matrix3d covariance;
};

Eigen::Vector3d design_row(double offset) { return {1.0, std::cos(offset), std::sin(offset)}; }

double phase_of(const Eigen::Vector3d& coef) { return std::atan2(-coef[2], coef[1]); }

Eigen::RowVector3d phase_gradient(const Eigen::Vector3d& coef) {
  const double r2 = coef[1] * coef[1] + coef[2] * coef[2];
  return {0.0, coef[2] / r2, -coef[1] / r2};
}

}  // namespace

double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * c::kPi);
  if (w <= -c::kPi) w += 2.0 * c::kPi;
  return w;
}

PeakIntensities cascade_intensities(double phi, double visibility, OutputPort port) {
  require_unit_interval(visibility, "visibility");
  const double sign = port == OutputPort::Primary ? 1.0 : -1.0;
  return {kSidePeak, kCentralMean * (1.0 + sign * visibility * std::cos(phi)), kSidePeak};
}

DetectionHistogram simulate_counts(const PeakIntensities& intensities, std::uint64_t n_sent,
                                   const CountingModel& counting, std::uint64_t seed) {
  require_unit_interval(counting.efficiency, "efficiency");
  require_unit_interval(counting.dark_probability, "dark_probability");
  if (n_sent == 0) {
    throw Error(ErrorCode::InvalidArgument, "n_sent must be > 0");
  }
  auto prob = [&](double intensity) {
    return std::clamp(intensity * counting.efficiency + counting.dark_probability, 0.0, 1.0);
  };
  const double pe = prob(intensities.early);
  const double pc = prob(intensities.central);
  const double pl = prob(intensities.late);
  if (pe + pc + pl > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "window probabilities sum above 1");
  }

  std::mt19937_64 rng(seed);
  DetectionHistogram h;
  h.n_sent = n_sent;
  // Sequential conditional binomials: marginals are Binomial(n, p_i) and the
  // joint draw is multinomial.
  h.counts_early = draw_binomial(rng, n_sent, pe);
  std::uint64_t remaining = n_sent - h.counts_early;
  h.counts_central = pe < 1.0 ? draw_binomial(rng, remaining, pc / (1.0 - pe)) : 0;
  remaining -= h.counts_central;
  const double rest = 1.0 - pe - pc;
  h.counts_late = rest > 0.0 ? draw_binomial(rng, remaining, pl / rest) : 0;
  return h;
}

std::vector<double> uniform_offsets(std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = 2.0 * c::kPi * static_cast<double>(i) / static_cast<double>(count);
  }
  return out;
}

std::vector<DetectionHistogram> fringe_scan(std::span<const double> offsets, double base_phase,
                                            double visibility, std::uint64_t n_per_point,
                                            const CountingModel& counting, std::uint64_t seed) {
  if (offsets.size() < 4) {
    throw Error(ErrorCode::InsufficientScan,
                fmt::format("fringe scan needs >= 4 points, got {}", offsets.size()));
  }
  const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
  if (!(*hi - *lo >= c::kPi - 1e-12)) {
    throw Error(ErrorCode::InsufficientScan,
                fmt::format("scan spans {} rad, needs >= pi", *hi - *lo));
  }
  std::vector<DetectionHistogram> scan;
  scan.reserve(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint64_t point_seed = 0;
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    point_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];

    const PeakIntensities peaks = cascade_intensities(base_phase + offsets[i], visibility);
    DetectionHistogram h = simulate_counts(peaks, n_per_point, counting, point_seed);
    h.phase_setting = offsets[i];
    scan.push_back(h);
  }
  return scan;
}

namespace {

LinearFringe solve_fringe(std::span<const DetectionHistogram> scan) {
  const std::size_t n = scan.size();
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t k = 0; k < n; ++k) {
    X.row(static_cast<Eigen::Index>(k)) = design_row(scan[k].phase_setting).transpose();
    y[static_cast<Eigen::Index>(k)] = static_cast<double>(scan[k].counts_central);
  }

  // Poisson variance: start from the observed counts, then refine with the
  // model prediction.
  Eigen::VectorXd variance = y.cwiseMax(1.0);
  LinearFringe out;
  for (int pass = 0; pass < kReweightPasses; ++pass) {
    const Eigen::VectorXd w = variance.cwiseInverse();
    const Eigen::Matrix3d normal = X.transpose() * w.asDiagonal() * X;
    const Eigen::Vector3d rhs = X.transpose() * w.asDiagonal() * y;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::FitDiverged, "normal matrix of the fringe fit is singular");
    }
    out.coef = lu.solve(rhs);
    out.covariance = lu.inverse();
    variance = (X * out.coef).cwiseMax(1.0);
  }
  return out;
}

}  // namespace

PhaseFit fit_phase(std::span<const DetectionHistogram> scan) {
  if (scan.size() < 4) {
    throw Error(ErrorCode::InsufficientScan,
                fmt::format("phase fit needs >= 4 points, got {}", scan.size()));
  }
  const LinearFringe lin = solve_fringe(scan);

  PhaseFit fit;
  fit.amplitude = lin.coef[0];
  const double swing = std::hypot(lin.coef[1], lin.coef[2]);
  fit.residuals.reserve(scan.size());
  for (const auto& h : scan) {
    const double model = design_row(h.phase_setting).dot(lin.coef);
    const double r = static_cast<double>(h.counts_central) - model;
    fit.residuals.push_back(r);
    fit.chi2 += r * r / std::max(model, 1.0);
  }
  if (!lin.coef.allFinite() || !(fit.amplitude > 0.0)) {
    std::string res;
    for (double r : fit.residuals) res += fmt::format(" {:.3g}", r);
    throw Error(ErrorCode::FitDiverged,
                fmt::format("non-physical fringe amplitude {}; residuals:{}", fit.amplitude, res));
  }
  fit.visibility = swing / fit.amplitude;
  if (fit.visibility < kMinVisibility) {
    throw Error(ErrorCode::DegenerateVisibility,
                fmt::format("fitted visibility {:.4g} < {}; phase unidentifiable",
                            fit.visibility, kMinVisibility));
  }
  fit.phi = wrap_phase(phase_of(lin.coef));
  const Eigen::RowVector3d grad = phase_gradient(lin.coef);
  fit.sigma_phi = std::sqrt((grad * lin.covariance * grad.transpose())(0, 0));
  return fit;
}

double predicted_phase_sigma(double phi, double visibility, std::span<const double> offsets,
                             std::uint64_t n_per_point, const CountingModel& counting) {
  const double n = static_cast<double>(n_per_point);
  const double amplitude = n * counting.efficiency * kCentralMean;
  const double background = n * counting.dark_probability;
  const Eigen::Vector3d coef(amplitude + background, amplitude * visibility * std::cos(phi),
                             -amplitude * visibility * std::sin(phi));
  Eigen::Matrix3d fisher = Eigen::Matrix3d::Zero();
  for (double o : offsets) {
    const Eigen::Vector3d x = design_row(o);
    const double mean = x.dot(coef);
    if (mean <= 0.0) continue;
    fisher += x * x.transpose() / mean;
  }
  Eigen::FullPivLU<Eigen::Matrix3d> lu(fisher);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::FitDiverged, "Fisher matrix is singular");
  }
  const Eigen::RowVector3d grad = phase_gradient(coef);
  return std::sqrt((grad * lu.inverse() * grad.transpose())(0, 0));
}

std::string format_histograms(std::span<const DetectionHistogram> scan) {
  std::string out = "offset_rad\tearly\tcentral\tlate\tn_sent\n";
  for (const auto& h : scan) {
    out += fmt::format("{:.17g}\t{}\t{}\t{}\t{}\n", h.phase_setting, h.counts_early,
                       h.counts_central, h.counts_late, h.n_sent);
  }
  return out;
}

}  // namespace lpisim
