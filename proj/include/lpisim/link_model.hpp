#pragma once

#include "lpisim/kinematics.hpp"

namespace lpisim {

/// Phases are carried in extended precision: the raw interferometric phases
/// reach 1e6 rad while the quantity of interest after Doppler cancellation
/// is a few rad, so double would leave ~1e-10 rad of rounding in S.
using Real = long double;

struct OpticalConfig {
  double wavelength = 800e-9;  // m
  double omega0 = 0.0;         // rad/s, proper emitted frequency (also the omega_11 of the redshift law)
  double delay_length = 6e3;   // m, interferometer imbalance
  double tau_l = 0.0;          // s, proper temporal imbalance

  /// omega0 = 2 pi c / wavelength, tau_l = delay_length * group_index / c.
  static OpticalConfig from_wavelength(double wavelength, double delay_length,
                                       double group_index = 1.0);

  /// omega0 * tau_l, the scale between fractional frequency shift and phase.
  Real phase_scale() const { return static_cast<Real>(omega0) * static_cast<Real>(tau_l); }
};

/// Throws InvalidArgument unless wavelength > 0, tau_l > 0 and
/// omega0 * wavelength = 2 pi c to 1e-9.
void validate(const OpticalConfig& cfg);

struct RedshiftParams {
  double alpha = 0.0;  // LPI violation; 0 in general relativity
};

struct PhasePair {
  Real phi_sc = 0;    // rad
  Real phi_gs = 0;    // rad
  Real s_signal = 0;  // rad, phi_sc - phi_gs / 2
};

/// Order-of-magnitude phase (1 + alpha) (2 pi / lambda) g h l / c^2.
double gravitational_phase(const OpticalConfig& cfg, double g, double h, double alpha);

/// omega_12 / omega_0 for the uplink, evaluated as printed (no expansion).
Real uplink_frequency_ratio(const LinkGeometry& geom);

/// omega_13 / omega_0 after the retro-reflected round trip.
Real roundtrip_frequency_ratio(const LinkGeometry& geom);

/// uplink ratio - 1 with (U2 - U1) replaced by (1 + alpha)(U2 - U1),
/// evaluated as (numerator - denominator) / denominator with the difference
/// expanded symbolically so no O(1) terms cancel.
Real uplink_fractional_shift(const LinkGeometry& geom, double alpha = 0.0);

/// roundtrip ratio - 1, cancellation-free.
Real roundtrip_fractional_shift(const LinkGeometry& geom);

PhasePair phase_pair(const LinkGeometry& geom, const OpticalConfig& cfg,
                     const RedshiftParams& red);

/// Second-order kinematic part of S / (omega0 tau_l):
/// (beta1 - beta2)^2 / 2 - (d1 - d2)^2 - T n12 . a1 / c.
Real kinematic_signal_terms(const LinkGeometry& geom);

/// S / (omega0 tau_l) to second order: (1 + alpha)(U2 - U1) + kinematic terms.
Real expanded_signal(const LinkGeometry& geom, const RedshiftParams& red);

/// First-order Doppler shift of the uplink, d1 - d2.
Real first_order_doppler(const LinkGeometry& geom);

/// (1 + alpha)(U2 - U1).
double redshift_fraction(const RedshiftParams& red, double U1, double U2);

}  // namespace lpisim
