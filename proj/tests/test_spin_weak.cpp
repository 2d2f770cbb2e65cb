#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"
#include "lpisim/spin_weak.hpp"
#include "oracles.hpp"

using namespace lpisim;

namespace {

constexpr double kHbar = 1.054571817e-34;
const Complex kI{0.0, 1.0};

Eigen::VectorXd sorted_eigenvalues(const MatrixXc& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  return es.eigenvalues();
}

// Posterior pointer mean for A = sigma_x from the Gaussian overlap integrals:
// psi(y) = w+ G(y - q) + w- G(y + q) with G of variance width^2 in |G|^2.
double sigma_x_shift_oracle(double q, double width, const QuantumState& si, const QuantumState& sf) {
  const auto plus = QuantumState::plus().amplitudes();
  const auto minus = QuantumState::minus().amplitudes();
  const Complex wp = sf.amplitudes().dot(plus) * plus.dot(si.amplitudes());
  const Complex wm = sf.amplitudes().dot(minus) * minus.dot(si.amplitudes());
  const double overlap = std::exp(-q * q / (2 * width * width));
  const double norm = std::norm(wp) + std::norm(wm) + 2 * (wp * std::conj(wm)).real() * overlap;
  return q * (std::norm(wp) - std::norm(wm)) / norm;
}

MatrixXc random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  MatrixXc m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
  return 0.5 * (m + m.adjoint());
}

QuantumState random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> d(0.0, 1.0);
  VectorXc v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(d(rng), d(rng));
  return QuantumState::from_amplitudes(v, true);
}

}  // namespace

TEST_CASE("Pauli matrices") {
  CHECK(pauli(3) == Matrix2c(Eigen::Vector2cd(1.0, -1.0).asDiagonal()));
  CHECK((pauli(1) * pauli(2) - kI * pauli(3)).norm() < 1e-15);
  for (int a = 1; a <= 3; ++a) {
    const auto e = sorted_eigenvalues(pauli(a));
    CHECK(e(0) == doctest::Approx(-1.0));
    CHECK(e(1) == doctest::Approx(1.0));
    CHECK((pauli(a) - pauli(a).adjoint()).norm() == 0.0);
    CHECK(std::abs(pauli(a).trace()) == 0.0);
    CHECK((pauli(a) * pauli(a) - Matrix2c::Identity()).norm() < 1e-15);
  }
  CHECK_THROWS_AS(pauli(0), Error);
  CHECK_THROWS_AS(pauli(4), Error);
}

TEST_CASE("quantum states") {
  CHECK_THROWS_AS(QuantumState::from_amplitudes(VectorXc::Ones(3), true), Error);
  CHECK_THROWS_AS(QuantumState::from_amplitudes(VectorXc::Ones(2)), Error);
  CHECK(QuantumState::from_amplitudes(VectorXc::Ones(4), true).norm() == doctest::Approx(1.0));
  CHECK(std::abs(QuantumState::plus().inner(QuantumState::minus())) < 1e-16);
  const auto t = QuantumState::tensor(QuantumState::one(), QuantumState::zero());
  CHECK(std::abs(t.amplitudes()(2) - 1.0) < 1e-16);  // |1>_S |0>_M
}

TEST_CASE("rotation and spin-orbit terms") {
  SpinCouplingParams p;
  p.omega = Vec3(0, 0, 2.0);
  auto e = sorted_eigenvalues(h_sigma(p));
  CHECK(e(0) == doctest::Approx(-kHbar).epsilon(1e-12));
  CHECK(e(1) == doctest::Approx(kHbar).epsilon(1e-12));

  p.omega = Vec3::Zero();
  p.momentum = Vec3(0, 0, 3e-20);
  CHECK(h_sigma(p).norm() == 0.0);

  p.momentum = Vec3::Zero();
  p.omega = Vec3(0, 0, constants::kEarthRotationRate);
  e = sorted_eigenvalues(h_sigma(p));
  CHECK(std::abs(e(0)) / kHbar == doctest::Approx(3.646e-5).epsilon(1e-3));

  // sigma . (a x p) with a along z, p along x gives a sigma_y term.
  p.omega = Vec3::Zero();
  p.momentum = Vec3(1e-20, 0, 0);
  const double scale = kHbar / (4 * p.mass * oracle::kC * oracle::kC) * 9.81 * 1e-20;
  CHECK((h_sigma(p) - scale * pauli(2)).norm() < 1e-12 * scale);
}

TEST_CASE("spin-acceleration coupling") {
  SpinCouplingParams p;
  p.k = 0.0;
  CHECK(h_ext(p).norm() == 0.0);
  p.k = 1.0;
  const auto e = sorted_eigenvalues(h_ext(p));
  const double expected = kHbar * 9.81 / (2 * oracle::kC);
  CHECK(e(1) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(2 * e(1) / 1.602176634e-19 == doctest::Approx(2.15e-23).epsilon(0.03));
  SpinCouplingParams twice = p;
  twice.k = 2.0;
  CHECK(h_ext(twice) == 2.0 * h_ext(p));
}

TEST_CASE("two-spin Hamiltonian limits") {
  SpinCouplingParams p;
  p.J = 3e-30;
  p.g = 1e-300;
  p.h_vec = Vec3(0.3, -0.2, 0.5);
  auto e = sorted_eigenvalues(two_spin_hamiltonian(p).total);
  CHECK(e(0) == doctest::Approx(-p.J));
  CHECK(e(1) == doctest::Approx(-p.J));
  CHECK(e(2) == doctest::Approx(p.J));
  CHECK(e(3) == doctest::Approx(p.J));

  SpinCouplingParams q;
  const double unit = kHbar * 9.81 / oracle::kC;
  e = sorted_eigenvalues(two_spin_hamiltonian(q).total);
  CHECK(e(0) == doctest::Approx(-unit).epsilon(1e-12));
  CHECK(std::abs(e(1)) < 1e-12 * unit);
  CHECK(std::abs(e(2)) < 1e-12 * unit);
  CHECK(e(3) == doctest::Approx(unit).epsilon(1e-12));

  // Exchange scale from lambda and t.
  SpinCouplingParams r;
  r.J = 2e-34;
  r.t = 0.5;
  r.derive_lambda();
  CHECK(r.lambda_c == doctest::Approx(2e-34 * 0.5 / kHbar).epsilon(1e-12));
  CHECK(two_spin_hamiltonian(r).exchange_scale == doctest::Approx(r.J).epsilon(1e-12));
  CHECK(check_invariants(r).empty());
  r.lambda_c *= 1.01;
  CHECK(!check_invariants(r).empty());
}

TEST_CASE("single-spin part equals the rotation plus acceleration terms at k = 1") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> w(0.0, 1e-4);
  for (int i = 0; i < 200; ++i) {
    SpinCouplingParams p;
    p.omega = Vec3(w(rng), w(rng), w(rng));
    p.k = 1.0;
    p.derive_h_from_omega();
    const Matrix2c single = h_sigma(p) + h_ext(p);
    const Matrix4c expected = on_system(single) + on_meter(single);
    const auto h = two_spin_hamiltonian(p);
    CHECK((h.h1 - expected).norm() <= 1e-12 * expected.norm());
    // The printed (h_z + 1) structure.
    const double s = kHbar * p.g / (2 * oracle::kC);
    const Matrix4c printed =
        s * (p.h_vec.x() * (on_system(pauli(1)) + on_meter(pauli(1))) +
             p.h_vec.y() * (on_system(pauli(2)) + on_meter(pauli(2))) +
             (p.h_vec.z() + 1.0) * (on_system(pauli(3)) + on_meter(pauli(3))));
    CHECK((h.h1 - printed).norm() <= 1e-12 * printed.norm());
  }
}

TEST_CASE("Hamiltonians are Hermitian and evolution is unitary") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    SpinCouplingParams p;
    p.omega = Vec3(d(rng), d(rng), d(rng)) * 1e-4;
    p.momentum = Vec3(d(rng), d(rng), d(rng)) * 1e-22;
    p.k = d(rng);
    p.g = std::abs(d(rng)) * 10 + 0.1;
    p.J = d(rng) * 1e-41;
    p.derive_h_from_omega();
    const Matrix4c h = two_spin_hamiltonian(p).total;
    CHECK((h - h.adjoint()).norm() <= 1e-15 * h.norm());
    const auto psi = evolve(random_state(rng, 4), h, std::abs(d(rng)) * 1e7);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("evolution examples") {
  std::mt19937_64 rng(2);
  const auto psi = random_state(rng, 4);
  const auto same = evolve(psi, random_hermitian(rng, 4, 1e-34), 0.0);
  CHECK((same.amplitudes() - psi.amplitudes()).norm() < 1e-15);

  const double omega = 3.0;
  const MatrixXc h = 0.5 * kHbar * omega * pauli(3);
  const auto flipped = evolve(QuantumState::plus(), h, oracle::kPi / omega);
  CHECK(std::abs(std::abs(flipped.inner(QuantumState::minus())) - 1.0) < 1e-10);

  MatrixXc bad = random_hermitian(rng, 2, 1.0);
  bad(0, 1) += 0.1;
  CHECK_THROWS_AS(evolve(QuantumState::zero(), bad, 1.0), Error);
  CHECK_THROWS_AS(evolve(QuantumState::zero(), random_hermitian(rng, 4, 1.0), 1.0), Error);
}

TEST_CASE("weak values") {
  for (double theta : {0.1, 0.8, 1.47, 1.5707}) {
    const Complex aw = weak_value(pauli(1), QuantumState::zero(), QuantumState::on_meridian(theta));
    CHECK(std::abs(aw - std::tan(theta)) <= 1e-12 * std::max(1.0, std::tan(theta)));
  }
  CHECK(weak_value(pauli(1), QuantumState::zero(), QuantumState::on_meridian(1.47)).real() ==
        doctest::Approx(9.89).epsilon(0.01));
  CHECK(std::abs(weak_value(pauli(1), QuantumState::minus(), QuantumState::minus()) + 1.0) < 1e-15);
  CHECK_THROWS_AS(weak_value(pauli(1), QuantumState::zero(), QuantumState::one()), Error);
}

TEST_CASE("meter shift agrees with the Gaussian-overlap closed form") {
  const GaussianMeter meter{0.0, 1.3};
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto si = random_state(rng, 2);
    const auto sf = random_state(rng, 2);
    const double q = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const auto m = meter_shift(q, pauli(1), si, sf, meter);
    CHECK(m.shift_exact == doctest::Approx(sigma_x_shift_oracle(q, 1.3, si, sf)).epsilon(1e-9));
  }
  for (double gap : {1e-2, 1e-4, 1e-6}) {
    const auto sf = QuantumState::on_meridian(oracle::kPi / 2 - gap);
    for (double q : {1e-4, 1e-2, 0.3}) {
      const auto m = meter_shift(q, pauli(1), QuantumState::zero(), sf, meter);
      CHECK(m.shift_exact ==
            doctest::Approx(sigma_x_shift_oracle(q, 1.3, QuantumState::zero(), sf)).epsilon(1e-6));
    }
  }
  for (double q : {1e-3, 0.5, 4.0}) {
    const auto m = meter_shift(q, pauli(3), QuantumState::one(), QuantumState::one(), meter);
    CHECK(m.shift_exact == doctest::Approx(-q).epsilon(1e-10));
    CHECK(m.shift_weak == doctest::Approx(-q).epsilon(1e-15));
    CHECK(m.postselection_prob == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("weak regime, strong regime and quadratic convergence") {
  const GaussianMeter meter{0.0, 1.0};
  const auto si = QuantumState::zero();
  const auto sf = QuantumState::on_meridian(1.47);
  auto rel = [&](double q) {
    const auto m = meter_shift(q, pauli(1), si, sf, meter);
    return std::abs(m.shift_exact - m.shift_weak) / std::abs(m.shift_weak);
  };
  CHECK(rel(1e-3) < 1e-2);
  CHECK(rel(1.0) > 0.1);
  CHECK(rel(1e-2) / rel(5e-3) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(rel(2e-3) / rel(1e-3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("amplification is paid for in post-selection probability") {
  const GaussianMeter meter{0.0, 1.0};
  for (int i = 0; i < 200; ++i) {
    const double theta = 1.0 + (oracle::kPi / 2 - 1.0 - 1e-6) * i / 199.0;
    const auto sf = QuantumState::on_meridian(theta);
    const double q = 1e-4;
    const auto m = meter_shift(q, pauli(1), QuantumState::zero(), sf, meter);
    // Weak limit: |<f|i>|^2 |A_w|^2 = |<f|A|i>|^2 <= max|eig|^2 = 1.
    CHECK(std::norm(sf.inner(QuantumState::zero())) * std::norm(m.weak_value) <= 1.0 + 1e-12);
    // The pointer adds (q |A_w| / 2 width)^2 once the kick is no longer small.
    const double kick = q * std::abs(m.weak_value) / (2 * meter.width);
    CHECK(m.postselection_prob * std::norm(m.weak_value) <= 1.0 + kick * kick + 1e-6);
  }
}

TEST_CASE("orthogonal post-selection") {
  const GaussianMeter meter{0.0, 1.0};
  CHECK_THROWS_AS(meter_shift(0.0, pauli(1), QuantumState::zero(), QuantumState::one(), meter), Error);
  const auto m = meter_shift(0.1, pauli(1), QuantumState::zero(), QuantumState::one(), meter);
  CHECK(std::isnan(m.shift_weak));
  CHECK(m.postselection_prob > 0.0);
  CHECK(std::abs(m.shift_exact) < 1e-12);
}

TEST_CASE("published constants") {
  const auto table = constants_report();
  REQUIRE(table.size() == 3);
  for (const auto& k : table) CHECK(std::abs(k.relative_deviation()) < 0.03);
  CHECK(table[0].value == doctest::Approx(kHbar * 9.81 / oracle::kC / 1.602176634e-19).epsilon(1e-12));
  CHECK(table[2].value == doctest::Approx(7.2921159e-5 * oracle::kC / 9.81).epsilon(1e-12));
}
