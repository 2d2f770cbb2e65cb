#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lpisim/kinematics.hpp"

namespace lpisim {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// Normalised pure state of one (dimension 2) or two (dimension 4) spins.
/// Two-spin states are ordered system (S) tensor meter spin (M).
class QuantumState {
 public:
  /// Throws DimensionMismatch for dimensions other than 2 and 4, and
  /// NotNormalized when |norm - 1| > 1e-12 (unless `normalize` is set).
  static QuantumState from_amplitudes(VectorXc amplitudes, bool normalize = false);

  static QuantumState zero();   // |0>, sigma_3 = +1
  static QuantumState one();    // |1>
  static QuantumState plus();   // |+x>
  static QuantumState minus();  // |-x>
  /// cos(theta)|0> + sin(theta)|1>.
  static QuantumState on_meridian(double theta);
  static QuantumState tensor(const QuantumState& system, const QuantumState& meter);

  const VectorXc& amplitudes() const { return amplitudes_; }
  int dimension() const { return static_cast<int>(amplitudes_.size()); }
  double norm() const { return amplitudes_.norm(); }
  /// <this|other>
  Complex inner(const QuantumState& other) const;

 private:
  explicit QuantumState(VectorXc a) : amplitudes_(std::move(a)) {}
  VectorXc amplitudes_;
};

struct SpinCouplingParams {
  double g = 9.81;                           // m/s^2, acceleration magnitude
  Vec3 accel_direction{Vec3::UnitZ()};       // unit vector of the acceleration
  Vec3 omega{Vec3::Zero()};                  // rad/s, frame rotation
  double k = 1.0;                            // spin-acceleration coupling
  double mass = 1.67492749804e-27;           // kg
  Vec3 momentum{Vec3::Zero()};               // kg m/s
  Vec3 h_vec{Vec3::Zero()};                  // -c omega / g
  double J = 0.0;                            // J, exchange coupling
  double lambda_c = 0.0;                     // J t / hbar
  double t = 0.0;                            // s, interaction time
  double scalar_offset = 0.0;                // J, spin-independent part of the Hamiltonian

  Vec3 acceleration() const { return g * accel_direction; }
  /// Sets h_vec = -c omega / g (requires g > 0).
  SpinCouplingParams& derive_h_from_omega();
  /// Sets lambda_c = J t / hbar.
  SpinCouplingParams& derive_lambda();
};

/// Violated parameter invariants (empty when consistent).
std::vector<std::string> check_invariants(const SpinCouplingParams& params);

/// Standard Pauli matrix, axis in {1, 2, 3}; BadAxis otherwise.
Matrix2c pauli(int axis);

/// Single-spin operator sigma_axis acting on the system (S) or meter (M)
/// factor of the two-spin space.
Matrix4c on_system(const Matrix2c& op);
Matrix4c on_meter(const Matrix2c& op);

/// Rotation and spin-orbit terms: -(hbar/2) omega . sigma
/// + hbar / (4 m c^2) sigma . (a x p).
Matrix2c h_sigma(const SpinCouplingParams& params);

/// Spin-acceleration coupling (hbar k / 2c) a . sigma.
Matrix2c h_ext(const SpinCouplingParams& params);

struct TwoSpinHamiltonian {
  Matrix4c total;
  Matrix4c h0;                 // sigma_1^S sigma_1^M
  Matrix4c h1;                 // part proportional to g
  double exchange_scale = 0.0; // hbar lambda / t (= J)
};

/// J sigma_1^S sigma_1^M + (hbar g / 2c) [h . (sigma^S + sigma^M)
///   + k a_hat . (sigma^S + sigma^M)] + scalar offset. With a_hat = z and
/// k = 1 this is the exchange model with the (h_z + 1) structure.
TwoSpinHamiltonian two_spin_hamiltonian(const SpinCouplingParams& params);

/// exp(-i H t / hbar)|psi> by exact eigendecomposition. Throws NonHermitian
/// when ||H - H^dagger|| > 1e-10 ||H|| and DimensionMismatch.
QuantumState evolve(const QuantumState& state, const MatrixXc& hamiltonian, double t);

/// <s_f|A|s_i> / <s_f|s_i>; OrthogonalSelection when |<s_f|s_i>| < 1e-12.
Complex weak_value(const MatrixXc& observable, const QuantumState& s_i, const QuantumState& s_f);

/// Gaussian pointer wavefunction; `width` is the standard deviation of the
/// position distribution.
struct GaussianMeter {
  double mean = 0.0;
  double width = 1.0;
};

struct MeterShift {
  double shift_exact = 0.0;
  double shift_weak = 0.0;
  double postselection_prob = 0.0;
  Complex weak_value{0.0, 0.0};
};

/// Pointer displacement after exp(-i q A p) and post-selection on s_f.
/// shift_exact expands the coupled state in the eigenbasis of A (a sum of
/// shifted Gaussians), projects on s_f and integrates the pointer mean by
/// adaptive quadrature. shift_weak = q Re(A_w). When s_f is orthogonal to
/// s_i the weak value is undefined: OrthogonalSelection at q = 0, NaN
/// weak fields otherwise.
MeterShift meter_shift(double q, const MatrixXc& observable, const QuantumState& s_i,
                       const QuantumState& s_f, const GaussianMeter& meter);

struct NamedConstant {
  std::string name;
  std::string unit;
  double value = 0.0;
  double reference = 0.0;  // published figure the value is compared with

  double relative_deviation() const { return (value - reference) / reference; }
};

/// hbar g / c in eV, its equivalent magnetic field, and omega_E c / g.
std::vector<NamedConstant> constants_report();

}  // namespace lpisim
