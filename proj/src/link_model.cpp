#include "lpisim/link_model.hpp"

#include <cmath>

#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"

namespace lpisim {

namespace c = constants;

namespace {

constexpr Real kMinDenominator = 0.5L;

using Vec3L = Eigen::Matrix<Real, 3, 1>;

Vec3L ext(const Vec3& v) { return v.cast<Real>(); }

void require_denominator(Real value, const char* what) {
  if (!(value >= kMinDenominator)) {
    throw Error(ErrorCode::DegenerateGeometry,
                fmt::format("{} = {} < 0.5", what, static_cast<double>(value)));
  }
}

struct UplinkTerms {
  Real a;  // U1 + beta1^2 / 2
  Real b;  // U2' + beta2^2 / 2
  Real b_minus_a;
  Real d1;
  Real d2;
  Real d1_minus_d2;
};

UplinkTerms uplink_terms(const LinkGeometry& g, double alpha) {
  const Vec3L b1 = ext(g.beta1);
  const Vec3L b2 = ext(g.beta2);
  const Vec3L n12 = ext(g.n12);
  const Real dU = (1.0L + alpha) * (static_cast<Real>(g.U2) - static_cast<Real>(g.U1));
  UplinkTerms t;
  t.a = static_cast<Real>(g.U1) + 0.5L * b1.squaredNorm();
  t.b = static_cast<Real>(g.U1) + dU + 0.5L * b2.squaredNorm();
  t.b_minus_a = dU + 0.5L * (b2.squaredNorm() - b1.squaredNorm());
  t.d1 = n12.dot(b1);
  t.d2 = n12.dot(b2);
  t.d1_minus_d2 = n12.dot(b1 - b2);
  return t;
}

}  // namespace

OpticalConfig OpticalConfig::from_wavelength(double wavelength, double delay_length,
                                             double group_index) {
  OpticalConfig cfg;
  cfg.wavelength = wavelength;
  cfg.omega0 = 2.0 * c::kPi * c::kSpeedOfLight / wavelength;
  cfg.delay_length = delay_length;
  cfg.tau_l = delay_length * group_index / c::kSpeedOfLight;
  return cfg;
}

void validate(const OpticalConfig& cfg) {
  if (!(cfg.wavelength > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("wavelength {} m must be > 0", cfg.wavelength));
  }
  if (!(cfg.tau_l > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("tau_l {} s must be > 0", cfg.tau_l));
  }
  const double two_pi_c = 2.0 * c::kPi * c::kSpeedOfLight;
  if (!(std::abs(cfg.omega0 * cfg.wavelength - two_pi_c) <= 1e-9 * two_pi_c)) {
    throw Error(ErrorCode::InvalidArgument, "omega0 * wavelength differs from 2 pi c");
  }
}

double gravitational_phase(const OpticalConfig& cfg, double g, double h, double alpha) {
  if (!(g > 0.0) || !(h >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("need g > 0 and h >= 0 (g = {}, h = {})", g, h));
  }
  return (1.0 + alpha) * (2.0 * c::kPi / cfg.wavelength) * g * h * cfg.delay_length /
         (c::kSpeedOfLight * c::kSpeedOfLight);
}

Real uplink_frequency_ratio(const LinkGeometry& geom) {
  const UplinkTerms t = uplink_terms(geom, 0.0);
  require_denominator(1.0L - t.b, "1 - U2 - beta2^2/2");
  require_denominator(1.0L - t.d1, "1 - n12.beta1");
  return ((1.0L - t.a) / (1.0L - t.b)) * ((1.0L - t.d2) / (1.0L - t.d1));
}

Real roundtrip_frequency_ratio(const LinkGeometry& geom) {
  const Vec3L n12 = ext(geom.n12);
  const Vec3L n23 = ext(geom.n23);
  const Real d1 = n12.dot(ext(geom.beta1));
  const Real d2 = n12.dot(ext(geom.beta2));
  const Real e2 = n23.dot(ext(geom.beta2));
  const Real e3 = n23.dot(ext(geom.beta3));
  require_denominator(1.0L - e2, "1 - n23.beta2");
  require_denominator(1.0L - d1, "1 - n12.beta1");
  return ((1.0L - e3) / (1.0L - e2)) * ((1.0L - d2) / (1.0L - d1));
}

Real uplink_fractional_shift(const LinkGeometry& geom, double alpha) {
  const UplinkTerms t = uplink_terms(geom, alpha);
  const Real den_b = 1.0L - t.b;
  const Real den_d = 1.0L - t.d1;
  require_denominator(den_b, "1 - U2 - beta2^2/2");
  require_denominator(den_d, "1 - n12.beta1");
  // (1-a)(1-d2) - (1-b)(1-d1) = (b-a) + (d1-d2) + a d2 - b d1
  const Real numerator = t.b_minus_a + t.d1_minus_d2 + t.a * t.d2 - t.b * t.d1;
  return numerator / (den_b * den_d);
}

Real roundtrip_fractional_shift(const LinkGeometry& geom) {
  const Vec3L b1 = ext(geom.beta1);
  const Vec3L b2 = ext(geom.beta2);
  const Vec3L b3 = ext(geom.beta3);
  const Vec3L n12 = ext(geom.n12);
  const Vec3L n23 = ext(geom.n23);
  const Real d1 = n12.dot(b1);
  const Real d2 = n12.dot(b2);
  const Real e2 = n23.dot(b2);
  const Real e3 = n23.dot(b3);
  const Real den_e = 1.0L - e2;
  const Real den_d = 1.0L - d1;
  require_denominator(den_e, "1 - n23.beta2");
  require_denominator(den_d, "1 - n12.beta1");
  // (1-e3)(1-d2) - (1-e2)(1-d1) = (e2-e3) + (d1-d2) + e3 d2 - e2 d1
  const Real numerator = n23.dot(b2 - b3) + n12.dot(b1 - b2) + e3 * d2 - e2 * d1;
  return numerator / (den_e * den_d);
}

PhasePair phase_pair(const LinkGeometry& geom, const OpticalConfig& cfg,
                     const RedshiftParams& red) {
  const Real scale = cfg.phase_scale();
  PhasePair p;
  p.phi_sc = scale * uplink_fractional_shift(geom, red.alpha);
  p.phi_gs = scale * roundtrip_fractional_shift(geom);
  p.s_signal = p.phi_sc - 0.5L * p.phi_gs;
  return p;
}

Real kinematic_signal_terms(const LinkGeometry& geom) {
  const Vec3L db = ext(geom.beta1) - ext(geom.beta2);
  const Real dd = ext(geom.n12).dot(db);
  const Real accel = static_cast<Real>(geom.T) * ext(geom.n12).dot(ext(geom.a1)) /
                     static_cast<Real>(c::kSpeedOfLight);
  return 0.5L * db.squaredNorm() - dd * dd - accel;
}

Real expanded_signal(const LinkGeometry& geom, const RedshiftParams& red) {
  return (1.0L + red.alpha) * (static_cast<Real>(geom.U2) - static_cast<Real>(geom.U1)) +
         kinematic_signal_terms(geom);
}

Real first_order_doppler(const LinkGeometry& geom) {
  return ext(geom.n12).dot(ext(geom.beta1) - ext(geom.beta2));
}

double redshift_fraction(const RedshiftParams& red, double U1, double U2) {
  return (1.0 + red.alpha) * (U2 - U1);
}

}  // namespace lpisim
