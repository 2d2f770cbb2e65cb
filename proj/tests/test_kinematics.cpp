#include <doctest.h>

#include <random>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"
#include "lpisim/kinematics.hpp"
#include "oracles.hpp"

using namespace lpisim;

namespace {
ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("circular orbit matches the closed form and Kepler's third law") {
  const CircularOrbit o{6.771e6, 0.9, 0.0, 0.3};
  const oracle::Circle ref{6.771e6, 0.9, 0.3};
  for (double t : {0.0, 123.4, 4000.0}) {
    const auto s = circular_orbit_state(o, t);
    CHECK((s.position - ref.position(t)).norm() < 1e-6);
    CHECK((s.velocity - ref.velocity(t)).norm() < 1e-9);
    const Vec3 gravity = -oracle::kGM * s.position / std::pow(s.position.norm(), 3);
    CHECK((s.acceleration - gravity).norm() < 1e-9);
  }
  const double period = orbital_period(o.semi_major_axis);
  CHECK(period == doctest::Approx(2 * oracle::kPi / ref.rate()).epsilon(1e-14));
  CHECK(period == doctest::Approx(5546.0).epsilon(1e-3));  // ~92.4 min at 400 km
  CHECK((circular_orbit_state(o, period).position - circular_orbit_state(o, 0).position).norm() < 1e-4);
}

TEST_CASE("orbit and station inputs are range-checked") {
  CHECK(code_of([] { circular_orbit_state({6.0e6, 0, 0, 0}, 0); }) == ErrorCode::BadAltitude);
  CHECK(code_of([] { circular_orbit_state({6.0e7, 0, 0, 0}, 0); }) == ErrorCode::BadAltitude);
  CHECK(code_of([] { ground_station_state({2.0, 0, 0}, 0); }) == ErrorCode::BadLatitude);
}

TEST_CASE("ground station co-rotates with the Earth") {
  const GroundStation gs{0.7, -1.2, 850.0};
  const auto s0 = ground_station_state(gs, 0.0);
  CHECK(s0.position.norm() == doctest::Approx(constants::kEarthRadius + 850.0).epsilon(1e-15));
  const Vec3 omega(0, 0, oracle::kEarthRate);
  CHECK((s0.velocity - omega.cross(s0.position)).norm() < 1e-9);
  const double sidereal = 2 * oracle::kPi / oracle::kEarthRate;
  CHECK((ground_station_state(gs, sidereal).position - s0.position).norm() < 1e-6);
  const auto s1 = ground_station_state(gs, 3600.0);
  CHECK((s1.position - oracle::rotate_z(s0.position, oracle::kEarthRate * 3600.0)).norm() < 1e-6);
}

TEST_CASE("velocity and acceleration are derivatives of position") {
  const Trajectory traj = make_orbit_trajectory({7.2e6, 1.1, 0.4, 2.0});
  const double h = 1e-2;
  for (double t : {-300.0, 0.0, 911.0}) {
    const auto s = traj(t);
    const Vec3 v = (traj(t + h).position - traj(t - h).position) / (2 * h);
    const Vec3 a = (traj(t + h).velocity - traj(t - h).velocity) / (2 * h);
    CHECK((v - s.velocity).norm() < 1e-4);
    CHECK((a - s.acceleration).norm() < 1e-6);
  }
}

TEST_CASE("time scaling scales velocity and acceleration") {
  const Trajectory base = make_orbit_trajectory({7.0e6, 0.3, 0, 0});
  const Trajectory slow = make_time_scaled_trajectory(base, 0.1);
  const auto s = slow(50.0);
  const auto b = base(5.0);
  CHECK((s.position - b.position).norm() < 1e-9);
  CHECK((s.velocity - 0.1 * b.velocity).norm() < 1e-12);
  CHECK((s.acceleration - 0.01 * b.acceleration).norm() < 1e-12);
}

TEST_CASE("light time agrees with a brute-force root search") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const CircularOrbit o{std::uniform_real_distribution<double>(6.6e6, 4.2e7)(rng), angle(rng), angle(rng),
                          angle(rng)};
    const GroundStation gs{angle(rng) / 2.0, angle(rng), 100.0};
    const Trajectory sc = make_orbit_trajectory(o);
    const auto emitter = ground_station_state(gs, 10.0);
    const LightTime lt = solve_light_time(emitter, sc, 10.0);
    const double expected = oracle::light_time_bisection(
        emitter.position, [&](double t) { return sc(t).position; }, 10.0);
    CHECK(lt.duration == doctest::Approx(expected).epsilon(1e-12));
    CHECK(lt.direction.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  const Trajectory same = make_static_trajectory(Vec3(7e6, 0, 0));
  CHECK(code_of([&] { solve_light_time(same(0), same, 0); }) == ErrorCode::DegenerateGeometry);
}

TEST_CASE("zenith pass geometry") {
  const Trajectory gs = make_station_trajectory({0, 0, 0});
  const Trajectory sc = make_orbit_trajectory({6.771e6, 0, 0, 0});
  CHECK(elevation_angle(gs(0).position, sc(0).position) == doctest::Approx(oracle::kPi / 2).epsilon(1e-12));
  const LinkGeometry g = build_link_geometry(gs, sc, 0.0);
  CHECK(check_invariants(g).empty());
  CHECK(g.T == doctest::Approx(400e3 / oracle::kC).epsilon(1e-3));
  CHECK(g.T_down == doctest::Approx(g.T).epsilon(1e-3));
  CHECK(g.U1 == doctest::Approx(oracle::kGM / (oracle::kC * oracle::kC * 6.371e6)).epsilon(1e-14));
  CHECK(g.U2 < g.U1);
  CHECK(g.beta_max() == doctest::Approx(7672.6 / oracle::kC).epsilon(1e-3));
  CHECK(g.d1 == doctest::Approx(g.n12.dot(g.beta1)).epsilon(1e-15));
}

TEST_CASE("invariant checker flags broken geometry") {
  LinkGeometry g;
  g.beta2 = Vec3(2.0, 0, 0);
  g.n12 = Vec3(0, 0, 2);
  CHECK(!check_invariants(g).empty());
}

TEST_CASE("unphysical states are rejected when building a link") {
  const Trajectory inside = make_static_trajectory(Vec3(1e6, 0, 0));
  const Trajectory sc = make_orbit_trajectory({6.771e6, 0, 0, 0});
  CHECK(code_of([&] { build_link_geometry(inside, sc, 0.0); }) == ErrorCode::InvalidState);
}
