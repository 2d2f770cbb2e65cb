#include "lpisim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"

namespace lpisim {

namespace c = constants;

namespace {

constexpr double kMinSemiMajorAxis = 6.5e6;
constexpr double kMaxSemiMajorAxis = 5.0e7;
constexpr double kLightTimeTolerance = 1e-12;
constexpr int kLightTimeMaxIterations = 50;

}  // namespace

bool is_physical(const StateVector& state) {
  return state.position.norm() > 6.3e6 && state.velocity.norm() < 1.1e4;
}

StateVector circular_orbit_state(const CircularOrbit& orbit, double t) {
  const double a = orbit.semi_major_axis;
  if (!(a >= kMinSemiMajorAxis && a <= kMaxSemiMajorAxis)) {
    throw Error(ErrorCode::BadAltitude,
                fmt::format("semi-major axis {} m outside [{}, {}] m", a, kMinSemiMajorAxis,
                            kMaxSemiMajorAxis));
  }
  const double mean_motion = std::sqrt(c::kEarthGM / (a * a * a));
  const double u = orbit.phase + mean_motion * t;

  const double cos_raan = std::cos(orbit.raan);
  const double sin_raan = std::sin(orbit.raan);
  const double cos_inc = std::cos(orbit.inclination);
  const double sin_inc = std::sin(orbit.inclination);
  // P points at the ascending node, Q is 90 degrees ahead in the orbit plane.
  const Vec3 p(cos_raan, sin_raan, 0.0);
  const Vec3 q(-sin_raan * cos_inc, cos_raan * cos_inc, sin_inc);

  StateVector s;
  s.epoch = t;
  s.position = a * (std::cos(u) * p + std::sin(u) * q);
  s.velocity = mean_motion * a * (-std::sin(u) * p + std::cos(u) * q);
  s.acceleration = -mean_motion * mean_motion * s.position;
  return s;
}

double orbital_period(double semi_major_axis) {
  return 2.0 * c::kPi * std::sqrt(semi_major_axis * semi_major_axis * semi_major_axis / c::kEarthGM);
}

Vec3 rotate_z(const Vec3& v, double angle) {
  return Eigen::AngleAxisd(angle, Vec3::UnitZ()) * v;
}

Vec3 earth_rotation_vector() { return {0.0, 0.0, c::kEarthRotationRate}; }

StateVector ground_station_state(const GroundStation& station, double t) {
  if (!(std::abs(station.latitude) <= c::kPi / 2.0)) {
    throw Error(ErrorCode::BadLatitude, fmt::format("|latitude| = {} rad exceeds pi/2",
                                                    std::abs(station.latitude)));
  }
  const double radius = c::kEarthRadius + station.altitude;
  const double lon = station.longitude + c::kEarthRotationRate * t;
  const Vec3 omega = earth_rotation_vector();

  StateVector s;
  s.epoch = t;
  s.position = radius * Vec3(std::cos(station.latitude) * std::cos(lon),
                             std::cos(station.latitude) * std::sin(lon),
                             std::sin(station.latitude));
  s.velocity = omega.cross(s.position);
  s.acceleration = omega.cross(s.velocity);
  return s;
}

Trajectory make_orbit_trajectory(const CircularOrbit& orbit) {
  circular_orbit_state(orbit, 0.0);  // validate once, up front
  return [orbit](double t) { return circular_orbit_state(orbit, t); };
}

Trajectory make_station_trajectory(const GroundStation& station) {
  ground_station_state(station, 0.0);
  return [station](double t) { return ground_station_state(station, t); };
}

Trajectory make_static_trajectory(const Vec3& position) {
  return [position](double t) {
    StateVector s;
    s.position = position;
    s.epoch = t;
    return s;
  };
}

Trajectory make_time_scaled_trajectory(Trajectory base, double scale) {
  return [base = std::move(base), scale](double t) {
    StateVector s = base(scale * t);
    s.velocity *= scale;
    s.acceleration *= scale * scale;
    s.epoch = t;
    return s;
  };
}

LightTime solve_light_time(const StateVector& emitter, const Trajectory& receiver,
                           double t_emit) {
  LightTime out;
  double T = 0.0;
  for (int i = 1; i <= kLightTimeMaxIterations; ++i) {
    const Vec3 separation = receiver(t_emit + T).position - emitter.position;
    const double range = separation.norm();
    if (range < 1e-6) {
      throw Error(ErrorCode::DegenerateGeometry,
                  "receiver coincides with emitter; direction undefined");
    }
    const double next = range / c::kSpeedOfLight;
    const double step = next - T;
    T = next;
    if (std::abs(step) < kLightTimeTolerance) {
      out.duration = T;
      out.direction = separation / range;
      out.iterations = i;
      return out;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              fmt::format("light time did not converge in {} iterations (t_emit = {} s)",
                          kLightTimeMaxIterations, t_emit));
}

double newtonian_potential(const Vec3& position) {
  return c::kEarthGM / (c::kSpeedOfLight * c::kSpeedOfLight * position.norm());
}

double elevation_angle(const Vec3& station, const Vec3& target) {
  const Vec3 line_of_sight = (target - station).normalized();
  return std::asin(std::clamp(line_of_sight.dot(station.normalized()), -1.0, 1.0));
}

double LinkGeometry::beta_max() const {
  return std::max({beta1.norm(), beta2.norm(), beta3.norm()});
}

void refresh_projections(LinkGeometry& geom) {
  geom.d1 = geom.n12.dot(geom.beta1);
  geom.d2 = geom.n12.dot(geom.beta2);
  geom.d3 = geom.n23.dot(geom.beta3);
}

std::vector<std::string> check_invariants(const LinkGeometry& geom) {
  std::vector<std::string> violations;
  auto unit = [&](const Vec3& n, const char* name) {
    if (std::abs(n.norm() - 1.0) > 1e-12) {
      violations.push_back(fmt::format("|{}| = {:.15g} is not a unit vector", name, n.norm()));
    }
  };
  unit(geom.n12, "n12");
  unit(geom.n23, "n23");
  const Vec3* betas[] = {&geom.beta1, &geom.beta2, &geom.beta3};
  for (int i = 0; i < 3; ++i) {
    if (!(betas[i]->norm() < 4e-5)) {
      violations.push_back(fmt::format("|beta{}| = {:.6g} >= 4e-5", i + 1, betas[i]->norm()));
    }
  }
  const double potentials[] = {geom.U1, geom.U2, geom.U3};
  for (int i = 0; i < 3; ++i) {
    if (!(potentials[i] > 0.0 && potentials[i] < 1e-8)) {
      violations.push_back(fmt::format("U{} = {:.6g} outside (0, 1e-8)", i + 1, potentials[i]));
    }
  }
  if (std::abs(geom.U3 - geom.U1) > 1e-15) {
    violations.push_back(fmt::format("|U3 - U1| = {:.3g} > 1e-15", std::abs(geom.U3 - geom.U1)));
  }
  return violations;
}

LinkGeometry build_link_geometry(const Trajectory& station, const Trajectory& spacecraft,
                                 double t_emit) {
  const StateVector gs_emit = station(t_emit);
  const LightTime up = solve_light_time(gs_emit, spacecraft, t_emit);
  const double t_reflect = t_emit + up.duration;
  const StateVector sc = spacecraft(t_reflect);
  const LightTime down = solve_light_time(sc, station, t_reflect);
  const StateVector gs_recv = station(t_reflect + down.duration);

  for (const StateVector* s : {&gs_emit, &sc, &gs_recv}) {
    if (!is_physical(*s)) {
      throw Error(ErrorCode::InvalidState,
                  fmt::format("unphysical platform state at t = {} s (|r| = {} m, |v| = {} m/s)",
                              s->epoch, s->position.norm(), s->velocity.norm()));
    }
  }

  LinkGeometry g;
  g.t_emit = t_emit;
  g.beta1 = gs_emit.velocity / c::kSpeedOfLight;
  g.beta2 = sc.velocity / c::kSpeedOfLight;
  g.beta3 = gs_recv.velocity / c::kSpeedOfLight;
  g.n12 = up.direction;
  g.n23 = down.direction;
  g.U1 = newtonian_potential(gs_emit.position);
  g.U2 = newtonian_potential(sc.position);
  g.U3 = newtonian_potential(gs_recv.position);
  g.a1 = gs_emit.acceleration;
  g.T = up.duration;
  g.T_down = down.duration;
  refresh_projections(g);
  return g;
}

}  // namespace lpisim
