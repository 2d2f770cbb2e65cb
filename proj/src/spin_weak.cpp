#include "lpisim/spin_weak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"

namespace lpisim {

namespace c = constants;

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kOrthogonalityThreshold = 1e-12;
constexpr double kHermiticityTolerance = 1e-10;
constexpr double kPointerSpan = 12.0;  // widths beyond the outermost shifted Gaussian
constexpr double kQuadratureTolerance = 1e-12;
constexpr unsigned kQuadratureDepth = 12;  // near-orthogonal selections hit round-off before any tolerance

const Complex kI{0.0, 1.0};

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return m;
}

Matrix2c dot_sigma(const Vec3& v) {
  return v.x() * pauli(1) + v.y() * pauli(2) + v.z() * pauli(3);
}

void require_hermitian(const MatrixXc& h) {
  const double scale = h.norm();
  const double defect = (h - h.adjoint()).norm();
  if (defect > kHermiticityTolerance * scale) {
    throw Error(ErrorCode::NonHermitian,
                fmt::format("||H - H^dagger|| = {:.3g} exceeds 1e-10 ||H|| = {:.3g}", defect,
                            kHermiticityTolerance * scale));
  }
}

void require_same_dimension(const MatrixXc& op, const QuantumState& s) {
  if (op.rows() != s.dimension() || op.cols() != s.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("operator is {}x{}, state has dimension {}", op.rows(), op.cols(),
                            s.dimension()));
  }
}

}  // namespace

QuantumState QuantumState::from_amplitudes(VectorXc amplitudes, bool normalize) {
  if (amplitudes.size() != 2 && amplitudes.size() != 4) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("state dimension {} not in {{2, 4}}", amplitudes.size()));
  }
  const double n = amplitudes.norm();
  if (normalize) {
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error(ErrorCode::NotNormalized, "cannot normalise a zero or non-finite vector");
    }
    amplitudes /= n;
  } else if (!(std::abs(n - 1.0) <= kNormTolerance)) {
    throw Error(ErrorCode::NotNormalized, fmt::format("state norm {:.17g} != 1", n));
  }
  return QuantumState(std::move(amplitudes));
}

QuantumState QuantumState::zero() { return QuantumState(Eigen::Vector2cd(1.0, 0.0)); }
QuantumState QuantumState::one() { return QuantumState(Eigen::Vector2cd(0.0, 1.0)); }
QuantumState QuantumState::plus() {
  return QuantumState(Eigen::Vector2cd(M_SQRT1_2, M_SQRT1_2));
}
QuantumState QuantumState::minus() {
  return QuantumState(Eigen::Vector2cd(M_SQRT1_2, -M_SQRT1_2));
}
QuantumState QuantumState::on_meridian(double theta) {
  return QuantumState(Eigen::Vector2cd(std::cos(theta), std::sin(theta)));
}

QuantumState QuantumState::tensor(const QuantumState& system, const QuantumState& meter) {
  if (system.dimension() != 2 || meter.dimension() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "tensor product needs two single-spin states");
  }
  VectorXc v(4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) v[2 * i + j] = system.amplitudes_[i] * meter.amplitudes_[j];
  return from_amplitudes(std::move(v), true);
}

Complex QuantumState::inner(const QuantumState& other) const {
  if (other.dimension() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "inner product of states of different dimension");
  }
  return amplitudes_.dot(other.amplitudes_);  // conjugates the left operand
}

SpinCouplingParams& SpinCouplingParams::derive_h_from_omega() {
  if (!(g > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "h = -c omega / g needs g > 0");
  }
  h_vec = -c::kSpeedOfLight * omega / g;
  return *this;
}

SpinCouplingParams& SpinCouplingParams::derive_lambda() {
  lambda_c = J * t / c::kHbar;
  return *this;
}

std::vector<std::string> check_invariants(const SpinCouplingParams& p) {
  std::vector<std::string> out;
  if (!(p.g >= 0.0)) out.push_back(fmt::format("g = {} must be >= 0", p.g));
  if (!(std::abs(p.accel_direction.norm() - 1.0) < 1e-12)) {
    out.push_back("accel_direction must be a unit vector");
  }
  if (!(p.mass > 0.0)) out.push_back(fmt::format("mass = {} must be > 0", p.mass));
  if (p.t != 0.0 && p.J != 0.0) {
    const double expected = p.J * p.t / c::kHbar;
    if (std::abs(p.lambda_c - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
      out.push_back(fmt::format("lambda_c = {} differs from J t / hbar = {}", p.lambda_c, expected));
    }
  }
  return out;
}

Matrix2c pauli(int axis) {
  Matrix2c m;
  switch (axis) {
    case 1: m << 0.0, 1.0, 1.0, 0.0; break;
    case 2: m << 0.0, -kI, kI, 0.0; break;
    case 3: m << 1.0, 0.0, 0.0, -1.0; break;
    default: throw Error(ErrorCode::BadAxis, fmt::format("Pauli axis {} not in {{1, 2, 3}}", axis));
  }
  return m;
}

Matrix4c on_system(const Matrix2c& op) { return kron(op, Matrix2c::Identity()); }
Matrix4c on_meter(const Matrix2c& op) { return kron(Matrix2c::Identity(), op); }

Matrix2c h_sigma(const SpinCouplingParams& p) {
  if (!(p.mass > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("mass = {} must be > 0", p.mass));
  }
  const Vec3 a_cross_p = p.acceleration().cross(p.momentum);
  return -0.5 * c::kHbar * dot_sigma(p.omega) +
         (c::kHbar / (4.0 * p.mass * c::kSpeedOfLight * c::kSpeedOfLight)) * dot_sigma(a_cross_p);
}

Matrix2c h_ext(const SpinCouplingParams& p) {
  return (c::kHbar * p.k / (2.0 * c::kSpeedOfLight)) * dot_sigma(p.acceleration());
}

TwoSpinHamiltonian two_spin_hamiltonian(const SpinCouplingParams& p) {
  TwoSpinHamiltonian h;
  h.h0 = kron(pauli(1), pauli(1));
  h.exchange_scale = (p.t > 0.0 && p.lambda_c != 0.0) ? c::kHbar * p.lambda_c / p.t : p.J;

  const Vec3 field = p.h_vec + p.k * p.accel_direction;
  const Matrix2c single = dot_sigma(field);
  h.h1 = (c::kHbar * p.g / (2.0 * c::kSpeedOfLight)) * (on_system(single) + on_meter(single));
  h.total = h.exchange_scale * h.h0 + h.h1 + p.scalar_offset * Matrix4c::Identity();
  return h;
}

QuantumState evolve(const QuantumState& state, const MatrixXc& hamiltonian, double t) {
  require_same_dimension(hamiltonian, state);
  require_hermitian(hamiltonian);
  if (t == 0.0) return state;
  // Hermitian part only; the anti-Hermitian residue is below tolerance.
  const MatrixXc h = 0.5 * (hamiltonian + hamiltonian.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(h);
  const VectorXc phases = (eig.eigenvalues().cast<Complex>() * (-kI * t / c::kHbar)).array().exp();
  const VectorXc out =
      eig.eigenvectors() * (phases.asDiagonal() * (eig.eigenvectors().adjoint() * state.amplitudes()));
  return QuantumState::from_amplitudes(out);
}

Complex weak_value(const MatrixXc& observable, const QuantumState& s_i, const QuantumState& s_f) {
  require_same_dimension(observable, s_i);
  require_same_dimension(observable, s_f);
  const Complex overlap = s_f.inner(s_i);
  if (std::abs(overlap) < kOrthogonalityThreshold) {
    throw Error(ErrorCode::OrthogonalSelection,
                fmt::format("|<s_f|s_i>| = {:.3g}; weak value undefined", std::abs(overlap)));
  }
  return s_f.amplitudes().dot(observable * s_i.amplitudes()) / overlap;
}

MeterShift meter_shift(double q, const MatrixXc& observable, const QuantumState& s_i,
                       const QuantumState& s_f, const GaussianMeter& meter) {
  require_same_dimension(observable, s_i);
  require_same_dimension(observable, s_f);
  require_hermitian(observable);
  if (!(meter.width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("meter width {} must be > 0", meter.width));
  }

  MeterShift out;
  const bool orthogonal = std::abs(s_f.inner(s_i)) < kOrthogonalityThreshold;
  if (orthogonal && q == 0.0) {
    throw Error(ErrorCode::OrthogonalSelection, "orthogonal pre/post-selection with q = 0");
  }
  if (orthogonal) {
    out.weak_value = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    out.shift_weak = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.weak_value = weak_value(observable, s_i, s_f);
    out.shift_weak = q * out.weak_value.real();
  }

  // exp(-i q A p) shifts the pointer by q a on each eigenvector of A.
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(0.5 * (observable + observable.adjoint()));
  const Eigen::VectorXd eigenvalues = eig.eigenvalues();
  const int n = static_cast<int>(eigenvalues.size());
  std::vector<Complex> weights(static_cast<std::size_t>(n));
  std::vector<double> shifts(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const auto v = eig.eigenvectors().col(j);
    weights[static_cast<std::size_t>(j)] = s_f.amplitudes().dot(v) * v.dot(s_i.amplitudes());
    shifts[static_cast<std::size_t>(j)] = q * eigenvalues[j];
  }

  const double sigma = meter.width;
  const double norm = std::pow(2.0 * c::kPi * sigma * sigma, -0.25);
  // Projected pointer amplitude, relative to the initial pointer mean.
  auto amplitude = [&](double y) {
    Complex sum{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const double u = y - shifts[static_cast<std::size_t>(j)];
      sum += weights[static_cast<std::size_t>(j)] * norm * std::exp(-u * u / (4.0 * sigma * sigma));
    }
    return sum;
  };
  const auto [lo_it, hi_it] = std::minmax_element(shifts.begin(), shifts.end());
  const double lo = *lo_it - kPointerSpan * sigma;
  const double hi = *hi_it + kPointerSpan * sigma;

  using boost::math::quadrature::gauss_kronrod;
  const double prob = gauss_kronrod<double, 61>::integrate(
      [&](double y) { return std::norm(amplitude(y)); }, lo, hi, kQuadratureDepth,
      kQuadratureTolerance);
  const double first_moment = gauss_kronrod<double, 61>::integrate(
      [&](double y) { return y * std::norm(amplitude(y)); }, lo, hi, kQuadratureDepth,
      kQuadratureTolerance);

  out.postselection_prob = prob;
  out.shift_exact = prob > 0.0 ? first_moment / prob : std::numeric_limits<double>::quiet_NaN();
  return out;
}

std::vector<NamedConstant> constants_report() {
  const double hbar_g_over_c = c::kHbar * c::kStandardGravity / c::kSpeedOfLight;  // J
  const double hbar_g_over_c_ev = hbar_g_over_c / c::kElectronVolt;
  return {
      {"hbar_g_over_c", "eV", hbar_g_over_c_ev, 2.15e-23},
      // Field whose Bohr-magneton energy mu_B B equals hbar g / c.
      {"equivalent_magnetic_field", "T", hbar_g_over_c_ev / c::kBohrMagnetonEv, 3.7e-19},
      {"rotation_to_gravity_ratio", "dimensionless",
       c::kEarthRotationRate * c::kSpeedOfLight / c::kStandardGravity, 2.22e3},
  };
}

}  // namespace lpisim
