#include "lpisim/estimator.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"
#include "lpisim/parallel.hpp"

namespace lpisim {

namespace {

constexpr Real kTwoPi = 2.0L * static_cast<Real>(constants::kPi);

Real wrap_extended(Real phi) {
  Real w = std::remainder(phi, kTwoPi);
  if (w <= -kTwoPi / 2) w += kTwoPi;
  return w;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct TerminalReadout {
  Real phi;
  double sigma;
};

// Fringe scan and fit at one terminal, unwrapped against `predicted`.
TerminalReadout read_terminal(Real true_phase, Real predicted, const ForecastScenario& sc,
                              std::uint64_t n_per_point, const CountingModel& counting,
                              std::uint64_t seed) {
  const double base = static_cast<double>(wrap_extended(true_phase));
  const auto scan = fringe_scan(sc.scan_offsets, base, sc.visibility, n_per_point, counting, seed);
  const PhaseFit fit = fit_phase(scan);
  const Real unwrapped = predicted + wrap_extended(static_cast<Real>(fit.phi) - predicted);
  return {unwrapped, fit.sigma_phi};
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + splitmix64(index));
}

AlphaEstimate estimate_alpha(const PassDataset& data, const OpticalConfig& cfg) {
  const std::size_t n = data.geometries.size();
  if (data.measurements.size() != n || (!data.epochs.empty() && data.epochs.size() != n)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("dataset lengths differ (geometries {}, measurements {}, epochs {})", n,
                            data.measurements.size(), data.epochs.size()));
  }
  validate(cfg);
  const Real scale = cfg.phase_scale();

  Real sxx = 0, sxr = 0;
  std::vector<Real> x(n), r(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = data.measurements[i];
    if (!(m.sigma_sc > 0.0) || !(m.sigma_gs > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("epoch {}: phase sigma must be > 0", i));
    }
    const auto& g = data.geometries[i];
    const Real s_meas = m.phi_sc - 0.5L * m.phi_gs;
    const Real var = static_cast<Real>(m.sigma_sc) * m.sigma_sc +
                     0.25L * static_cast<Real>(m.sigma_gs) * m.sigma_gs;
    w[i] = 1.0L / var;
    x[i] = scale * (static_cast<Real>(g.U2) - static_cast<Real>(g.U1));
    r[i] = s_meas - scale * kinematic_signal_terms(g);
    sxx += w[i] * x[i] * x[i];
    sxr += w[i] * x[i] * r[i];
  }
  if (!(sxx > 0)) {
    throw Error(ErrorCode::SingularFit, "U2 - U1 vanishes at every epoch; alpha unidentifiable");
  }
  if (n < 2) {
    throw Error(ErrorCode::InsufficientData, fmt::format("need >= 2 epochs, got {}", n));
  }
  const Real gain = sxr / sxx;  // estimate of 1 + alpha
  Real chi2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real e = r[i] - gain * x[i];
    chi2 += w[i] * e * e;
  }
  AlphaEstimate est;
  est.alpha_hat = static_cast<double>(gain - 1.0L);
  est.sigma_alpha = static_cast<double>(1.0L / std::sqrt(sxx));
  est.dof = n - 1;
  est.chi2_per_dof = static_cast<double>(chi2 / static_cast<Real>(est.dof));
  return est;
}

PassDataset synthesize_dataset(const std::vector<LinkGeometry>& geometries,
                               const OpticalConfig& cfg, const RedshiftParams& truth,
                               double phase_noise, std::uint64_t seed, SignalModel model) {
  PassDataset data;
  data.geometries = geometries;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma = phase_noise > 0.0 ? phase_noise : 1.0;
  for (const auto& g : geometries) {
    data.epochs.push_back(g.t_emit);
    const PhasePair exact = phase_pair(g, cfg, truth);
    PhaseMeasurement m;
    m.phi_gs = exact.phi_gs;
    m.phi_sc = model == SignalModel::Exact
                   ? exact.phi_sc
                   : 0.5L * exact.phi_gs + cfg.phase_scale() * expanded_signal(g, truth);
    if (phase_noise > 0.0) {
      m.phi_sc += phase_noise * noise(rng);
      m.phi_gs += phase_noise * noise(rng);
    }
    m.sigma_sc = sigma;
    m.sigma_gs = sigma;
    data.measurements.push_back(m);
  }
  return data;
}

std::vector<LinkGeometry> sweep_geometries(const Trajectory& station, const Trajectory& spacecraft,
                                           const std::vector<double>& epochs) {
  std::vector<LinkGeometry> out(epochs.size());
  parallel_for(epochs.size(),
               [&](std::size_t i) { out[i] = build_link_geometry(station, spacecraft, epochs[i]); });
  return out;
}

ForecastResult precision_forecast(const ForecastScenario& scenario, std::uint64_t photon_budget,
                                  int trials, std::uint64_t seed) {
  if (trials < 10) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("need >= 10 trials, got {}", trials));
  }
  const std::size_t n_epochs = scenario.geometries.size();
  const auto& model_geoms =
      scenario.model_geometries.empty() ? scenario.geometries : scenario.model_geometries;
  if (model_geoms.size() != n_epochs) {
    throw Error(ErrorCode::InvalidArgument, "model geometries do not match the epochs");
  }
  const std::uint64_t points = scenario.scan_offsets.size();
  const std::uint64_t n_per_point = points > 0 ? photon_budget / points : 0;
  if (!scenario.noise_free && n_per_point == 0) {
    throw Error(ErrorCode::InvalidArgument, "photon budget smaller than the number of scan points");
  }

  std::vector<PhasePair> truth(n_epochs), predicted(n_epochs);
  for (std::size_t i = 0; i < n_epochs; ++i) {
    truth[i] = phase_pair(scenario.geometries[i], scenario.optical, scenario.truth);
    predicted[i] = phase_pair(model_geoms[i], scenario.optical, RedshiftParams{});
  }

  ForecastResult result;
  result.trials.resize(static_cast<std::size_t>(trials));
  std::vector<double> sigma_sc(static_cast<std::size_t>(trials));
  std::vector<double> sigma_gs(static_cast<std::size_t>(trials));

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const std::uint64_t s = trial_seed(seed, t);
    PassDataset data;
    data.epochs = scenario.epochs;
    data.geometries = model_geoms;
    data.measurements.resize(n_epochs);
    double sum_sc = 0.0, sum_gs = 0.0;
    for (std::size_t i = 0; i < n_epochs; ++i) {
      PhaseMeasurement& m = data.measurements[i];
      if (scenario.noise_free) {
        m = {truth[i].phi_sc, 1.0, truth[i].phi_gs, 1.0};
      } else {
        const auto sc = read_terminal(truth[i].phi_sc, predicted[i].phi_sc, scenario, n_per_point,
                                      scenario.counting_sc, trial_seed(s, 2 * i));
        const auto gs = read_terminal(truth[i].phi_gs, predicted[i].phi_gs, scenario, n_per_point,
                                      scenario.counting_gs, trial_seed(s, 2 * i + 1));
        m = {sc.phi, sc.sigma, gs.phi, gs.sigma};
      }
      sum_sc += m.sigma_sc;
      sum_gs += m.sigma_gs;
    }
    result.trials[t] = {s, estimate_alpha(data, scenario.optical)};
    sigma_sc[t] = sum_sc / static_cast<double>(n_epochs);
    sigma_gs[t] = sum_gs / static_cast<double>(n_epochs);
  });

  // Deterministic fold in trial order.
  const double count = static_cast<double>(trials);
  double mean = 0.0, chi2 = 0.0;
  for (const auto& tr : result.trials) {
    mean += tr.estimate.alpha_hat;
    chi2 += tr.estimate.chi2_per_dof;
  }
  mean /= count;
  double var = 0.0;
  for (const auto& tr : result.trials) {
    var += (tr.estimate.alpha_hat - mean) * (tr.estimate.alpha_hat - mean);
  }
  result.mean_alpha_hat = mean;
  result.sigma_alpha_empirical = std::sqrt(var / (count - 1.0));
  result.mean_chi2_per_dof = chi2 / count;
  result.mean_sigma_phi_sc = std::accumulate(sigma_sc.begin(), sigma_sc.end(), 0.0) / count;
  result.mean_sigma_phi_gs = std::accumulate(sigma_gs.begin(), sigma_gs.end(), 0.0) / count;

  if (!scenario.noise_free) {
    const Real scale = scenario.optical.phase_scale();
    Real information = 0;
    for (std::size_t i = 0; i < n_epochs; ++i) {
      const double base_sc = static_cast<double>(wrap_extended(truth[i].phi_sc));
      const double base_gs = static_cast<double>(wrap_extended(truth[i].phi_gs));
      const double s_sc = predicted_phase_sigma(base_sc, scenario.visibility, scenario.scan_offsets,
                                                n_per_point, scenario.counting_sc);
      const double s_gs = predicted_phase_sigma(base_gs, scenario.visibility, scenario.scan_offsets,
                                                n_per_point, scenario.counting_gs);
      const Real var = static_cast<Real>(s_sc) * s_sc + 0.25L * static_cast<Real>(s_gs) * s_gs;
      const auto& g = model_geoms[i];
      const Real x = scale * (static_cast<Real>(g.U2) - static_cast<Real>(g.U1));
      information += x * x / var;
    }
    result.sigma_alpha_analytic = static_cast<double>(1.0L / std::sqrt(information));
  }
  return result;
}

double budget_for_sigma(double sigma_alpha, double photon_budget, double target) {
  return photon_budget * (sigma_alpha / target) * (sigma_alpha / target);
}

double required_phase_sigma(const ForecastScenario& scenario, double target) {
  const Real scale = scenario.optical.phase_scale();
  Real sum = 0;
  for (const auto& g : scenario.geometries) {
    const Real x = scale * (static_cast<Real>(g.U2) - static_cast<Real>(g.U1));
    sum += x * x;
  }
  // sigma_alpha = sigma_phi sqrt(1 + 1/4) / sqrt(sum x^2)
  return static_cast<double>(target * std::sqrt(sum) / std::sqrt(1.25L));
}

std::string format_trials(const ForecastResult& result) {
  std::string out = "seed\talpha_hat\tsigma_alpha\tchi2_per_dof\n";
  for (const auto& t : result.trials) {
    out += fmt::format("{}\t{:.17g}\t{:.17g}\t{:.17g}\n", t.seed, t.estimate.alpha_hat,
                       t.estimate.sigma_alpha, t.estimate.chi2_per_dof);
  }
  out += fmt::format("summary\t{:.17g}\t{:.17g}\t{:.17g}\n", result.mean_alpha_hat,
                     result.sigma_alpha_empirical, result.mean_chi2_per_dof);
  return out;
}

}  // namespace lpisim
