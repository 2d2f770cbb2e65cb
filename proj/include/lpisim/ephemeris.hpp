#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lpisim/kinematics.hpp"

namespace lpisim {

/// Epoch as written in prediction files: integer MJD plus seconds of day.
struct CpfEpoch {
  int mjd = 0;
  double sod = 0.0;

  friend bool operator==(const CpfEpoch&, const CpfEpoch&) = default;
};

/// `to - from` in seconds on a continuous (leap-second free) time scale.
double seconds_between(const CpfEpoch& from, const CpfEpoch& to);

/// Epoch `seconds` after `base`, normalised so that 0 <= sod < 86400.
CpfEpoch offset_epoch(const CpfEpoch& base, double seconds);

struct EphemerisRecord {
  int mjd = 0;
  double sod = 0.0;         // 0 <= sod < 86400
  Vec3 position{Vec3::Zero()};  // m, Earth-centered Earth-fixed

  CpfEpoch epoch() const { return {mjd, sod}; }
  friend bool operator==(const EphemerisRecord&, const EphemerisRecord&) = default;
};

enum class Frame { EarthFixed };

/// Position-only prediction table. Immutable once parsed; the frame is
/// always Earth-centered Earth-fixed.
struct EphemerisTable {
  std::vector<EphemerisRecord> records;
  std::string source;  // header lines (H1, H2, ...) joined by '\n'
  static constexpr Frame frame = Frame::EarthFixed;

  friend bool operator==(const EphemerisTable&, const EphemerisTable&) = default;
};

/// Parses the CPF subset: "10 <dir> <mjd> <sod> <leap> <x> <y> <z>" records
/// and "H<n>" header lines; everything else is skipped. Failures throw
/// ParseError carrying the 1-based line number.
EphemerisTable parse_cpf(std::string_view text);

EphemerisTable read_cpf_file(const std::filesystem::path& path);

/// Inverse of parse_cpf: headers, one "10" record per row, then "99".
std::string write_cpf(const EphemerisTable& table);

struct InterpolationOptions {
  /// Lagrange nodes per evaluation; clamped to the table size, minimum 4.
  std::size_t nodes = 8;
};

/// Inertial state at `t`. Position is Lagrange-interpolated in the Earth-fixed
/// frame; velocity and acceleration are the analytic derivatives of the same
/// polynomial. The Earth-fixed frame is rotated to inertial by omega_E times
/// the elapsed time since `reference` (which is scenario time zero and the
/// epoch at which both frames coincide).
StateVector interpolate_state(const EphemerisTable& table, const CpfEpoch& t,
                              const CpfEpoch& reference, const InterpolationOptions& options = {});

/// Same with the first record as the reference epoch.
StateVector interpolate_state(const EphemerisTable& table, const CpfEpoch& t,
                              const InterpolationOptions& options = {});

/// Trajectory over scenario time (seconds after `reference`).
Trajectory make_ephemeris_trajectory(std::shared_ptr<const EphemerisTable> table,
                                     const CpfEpoch& reference,
                                     const InterpolationOptions& options = {});

}  // namespace lpisim
