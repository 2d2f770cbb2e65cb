#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lpisim {

using Vec3 = Eigen::Vector3d;

/// Platform state in the Earth-centered inertial frame. `epoch` is the
/// continuous scenario time in seconds.
struct StateVector {
  Vec3 position{Vec3::Zero()};      // m
  Vec3 velocity{Vec3::Zero()};      // m/s
  Vec3 acceleration{Vec3::Zero()};  // m/s^2
  double epoch = 0.0;               // s
};

/// |r| > 6.3e6 m and |v| < 1.1e4 m/s.
bool is_physical(const StateVector& state);

/// Time-parameterized state source (scenario seconds -> inertial state).
using Trajectory = std::function<StateVector(double)>;

struct CircularOrbit {
  double semi_major_axis = 0.0;  // m
  double inclination = 0.0;      // rad
  double raan = 0.0;             // rad
  double phase = 0.0;            // rad, argument of latitude at t = 0
};

struct GroundStation {
  double latitude = 0.0;   // rad
  double longitude = 0.0;  // rad, measured from the inertial x axis at t = 0
  double altitude = 0.0;   // m above the spherical Earth
};

/// Two-body circular Keplerian state. Throws BadAltitude unless
/// 6.5e6 <= a <= 5e7 m.
StateVector circular_orbit_state(const CircularOrbit& orbit, double t);

/// Kepler's third law, 2*pi*sqrt(a^3/GM).
double orbital_period(double semi_major_axis);

/// Station on a spherical Earth rotating about +z. The acceleration field
/// carries the centripetal term w x (w x r).
StateVector ground_station_state(const GroundStation& station, double t);

Trajectory make_orbit_trajectory(const CircularOrbit& orbit);
Trajectory make_station_trajectory(const GroundStation& station);
Trajectory make_static_trajectory(const Vec3& position);

/// Replays `base` at a rate `scale`: r(t) -> r(scale*t). Velocities scale by
/// `scale`, accelerations by `scale^2`, the path is unchanged.
Trajectory make_time_scaled_trajectory(Trajectory base, double scale);

Vec3 rotate_z(const Vec3& v, double angle);

/// Earth rotation vector (0, 0, omega_E).
Vec3 earth_rotation_vector();

struct LightTime {
  double duration = 0.0;        // s
  Vec3 direction{Vec3::Zero()}; // emitter -> receiver at reception, unit
  int iterations = 0;
};

/// Fixed-point light-time solution |r_recv(t_emit + T) - r_emit| = c T,
/// iterated to |dT| < 1e-12 s. Throws DegenerateGeometry when the receiver
/// sits on the emitter and NoConvergence after 50 iterations.
LightTime solve_light_time(const StateVector& emitter, const Trajectory& receiver,
                           double t_emit);

/// U = GM / (c^2 |r|), positive (opposite sign to the Newtonian potential).
double newtonian_potential(const Vec3& position);

/// Elevation of `target` above the local horizontal of `station`
/// (spherical Earth), rad.
double elevation_angle(const Vec3& station, const Vec3& target);

/// Kinematic inputs of the up/down optical link: ground station (1) emits,
/// spacecraft (2) receives and retro-reflects, ground station (3) receives.
struct LinkGeometry {
  Vec3 beta1{Vec3::Zero()};
  Vec3 beta2{Vec3::Zero()};
  Vec3 beta3{Vec3::Zero()};
  Vec3 n12{Vec3::UnitZ()};
  Vec3 n23{-Vec3::UnitZ()};
  double U1 = 0.0;
  double U2 = 0.0;
  double U3 = 0.0;
  Vec3 a1{Vec3::Zero()};  // m/s^2, ground-station acceleration at emission
  double T = 0.0;         // s, upward light time
  double T_down = 0.0;    // s, downward light time
  double d1 = 0.0;        // n12 . beta1
  double d2 = 0.0;        // n12 . beta2
  double d3 = 0.0;        // n23 . beta3
  double t_emit = 0.0;    // s

  double beta_max() const;
};

/// Recomputes d1, d2, d3 from the vectors.
void refresh_projections(LinkGeometry& geom);

/// Lists violated LinkGeometry invariants (empty when all hold).
std::vector<std::string> check_invariants(const LinkGeometry& geom);

/// Assembles the full geometry for an emission at `t_emit`: up-leg light
/// time to the spacecraft, instantaneous retro-reflection, down-leg light
/// time back to the station.
LinkGeometry build_link_geometry(const Trajectory& station, const Trajectory& spacecraft,
                                 double t_emit);

}  // namespace lpisim
