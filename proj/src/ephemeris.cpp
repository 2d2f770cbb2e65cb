#include "lpisim/ephemeris.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <fmt/format.h>

#include "lpisim/constants.hpp"
#include "lpisim/error.hpp"

namespace lpisim {

namespace c = constants;

namespace {

constexpr double kMinRadius = 6.4e6;
constexpr double kMaxRadius = 5.0e8;
constexpr double kMaxGapRatio = 10.0;
constexpr std::size_t kRecordFields = 8;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw ParseError(ErrorCode::MalformedRecord, line_no,
                     fmt::format("{} field '{}' is not numeric", what, field));
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw ParseError(ErrorCode::MalformedRecord, line_no,
                       fmt::format("{} field '{}' is not finite", what, field));
    }
  }
  return value;
}

bool is_header(std::string_view first_field) {
  return first_field.size() == 2 && (first_field[0] == 'H' || first_field[0] == 'h') &&
         first_field[1] >= '0' && first_field[1] <= '9';
}

EphemerisRecord parse_record(const std::vector<std::string_view>& fields, std::size_t line_no) {
  if (fields.size() != kRecordFields) {
    throw ParseError(ErrorCode::MalformedRecord, line_no,
                     fmt::format("record type 10 needs {} fields, found {}", kRecordFields,
                                 fields.size()));
  }
  parse_number<int>(fields[1], line_no, "direction flag");
  EphemerisRecord rec;
  rec.mjd = parse_number<int>(fields[2], line_no, "MJD");
  rec.sod = parse_number<double>(fields[3], line_no, "seconds-of-day");
  parse_number<int>(fields[4], line_no, "leap-second flag");  // parsed, not used
  for (int i = 0; i < 3; ++i) {
    rec.position[i] = parse_number<double>(fields[5 + i], line_no, "coordinate");
  }
  if (!(rec.sod >= 0.0 && rec.sod < c::kSecondsPerDay)) {
    throw ParseError(ErrorCode::MalformedRecord, line_no,
                     fmt::format("seconds-of-day {} outside [0, 86400)", rec.sod));
  }
  const double radius = rec.position.norm();
  if (!(radius >= kMinRadius && radius <= kMaxRadius)) {
    throw ParseError(ErrorCode::MalformedRecord, line_no,
                     fmt::format("|position| = {} m outside [{}, {}] m", radius, kMinRadius,
                                 kMaxRadius));
  }
  return rec;
}

std::string shortest(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

// `x` is seconds after the first record, `t_scn` the scenario time of the
// same instant (seconds after the reference epoch).
StateVector interpolate_at(const EphemerisTable& table, double x, double t_scn,
                           const InterpolationOptions& options) {
  const auto& recs = table.records;
  if (recs.size() < 4) {
    throw Error(ErrorCode::InsufficientRecords,
                fmt::format("cubic interpolation needs >= 4 records, table has {}", recs.size()));
  }
  const CpfEpoch origin = recs.front().epoch();
  const double span = seconds_between(origin, recs.back().epoch());
  if (!(x >= 0.0 && x <= span)) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("epoch {} s after the first record is outside the table span [0, {}] s",
                            x, span));
  }

  const std::size_t n = std::clamp<std::size_t>(options.nodes, 4, recs.size());
  std::vector<double> nodes(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) nodes[i] = seconds_between(origin, recs[i].epoch());

  // Window of n nodes with t as central as the table allows.
  const auto upper = std::upper_bound(nodes.begin(), nodes.end(), x);
  const std::size_t right = static_cast<std::size_t>(upper - nodes.begin());
  const std::size_t half = n / 2;
  std::size_t first = right > half ? right - half : 0;
  first = std::min(first, recs.size() - n);

  // Local time origin at the window centre keeps the products well scaled.
  const double centre = 0.5 * (nodes[first] + nodes[first + n - 1]);
  const double u = x - centre;

  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
  for (std::size_t j = first; j < first + n; ++j) {
    const double uj = nodes[j] - centre;
    // Basis polynomial and its first two derivatives, built factor by factor.
    double l = 1.0, dl = 0.0, d2l = 0.0;
    for (std::size_t m = first; m < first + n; ++m) {
      if (m == j) continue;
      const double um = nodes[m] - centre;
      const double den = uj - um;
      const double f = (u - um) / den;
      const double df = 1.0 / den;
      d2l = d2l * f + 2.0 * dl * df;
      dl = dl * f + l * df;
      l *= f;
    }
    pos += l * recs[j].position;
    vel += dl * recs[j].position;
    acc += d2l * recs[j].position;
  }

  const Vec3 omega = earth_rotation_vector();
  const double angle = c::kEarthRotationRate * t_scn;

  StateVector s;
  s.epoch = t_scn;
  s.position = rotate_z(pos, angle);
  s.velocity = rotate_z(vel + omega.cross(pos), angle);
  s.acceleration = rotate_z(acc + 2.0 * omega.cross(vel) + omega.cross(omega.cross(pos)), angle);
  return s;
}

}  // namespace

double seconds_between(const CpfEpoch& from, const CpfEpoch& to) {
  return static_cast<double>(to.mjd - from.mjd) * c::kSecondsPerDay + (to.sod - from.sod);
}

CpfEpoch offset_epoch(const CpfEpoch& base, double seconds) {
  const double total = base.sod + seconds;
  const double days = std::floor(total / c::kSecondsPerDay);
  CpfEpoch out{base.mjd + static_cast<int>(days), total - days * c::kSecondsPerDay};
  if (out.sod >= c::kSecondsPerDay) {
    out.sod -= c::kSecondsPerDay;
    ++out.mjd;
  }
  return out;
}

EphemerisTable parse_cpf(std::string_view text) {
  EphemerisTable table;
  std::vector<std::size_t> record_lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (is_header(fields.front())) {
      if (!table.source.empty()) table.source += '\n';
      table.source += line;
    } else if (fields.front() == "10") {
      EphemerisRecord rec = parse_record(fields, line_no);
      if (!table.records.empty() &&
          !(seconds_between(table.records.back().epoch(), rec.epoch()) > 0.0)) {
        throw ParseError(ErrorCode::NonMonotonicTime, line_no,
                         fmt::format("epoch ({}, {}) does not follow ({}, {})", rec.mjd, rec.sod,
                                     table.records.back().mjd, table.records.back().sod));
      }
      table.records.push_back(rec);
      record_lines.push_back(line_no);
    }
    if (end == text.size()) break;
  }

  if (table.records.empty()) {
    throw ParseError(ErrorCode::EmptyEphemeris, line_no, "no position records found");
  }

  if (table.records.size() >= 3) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < table.records.size(); ++i) {
      gaps.push_back(seconds_between(table.records[i - 1].epoch(), table.records[i].epoch()));
    }
    std::vector<double> sorted = gaps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (gaps[i] > kMaxGapRatio * median) {
        throw ParseError(ErrorCode::IrregularSpacing, record_lines[i + 1],
                         fmt::format("gap of {} s exceeds {}x the median gap {} s", gaps[i],
                                     kMaxGapRatio, median));
      }
    }
  }
  return table;
}

EphemerisTable read_cpf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileUnreadable, fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cpf(buf.str());
}

std::string write_cpf(const EphemerisTable& table) {
  std::string out;
  if (!table.source.empty()) {
    out += table.source;
    out += '\n';
  }
  for (const auto& rec : table.records) {
    out += fmt::format("10 0 {} {} 0 {} {} {}\n", rec.mjd, shortest(rec.sod),
                       shortest(rec.position.x()), shortest(rec.position.y()),
                       shortest(rec.position.z()));
  }
  out += "99\n";
  return out;
}

StateVector interpolate_state(const EphemerisTable& table, const CpfEpoch& t,
                              const CpfEpoch& reference, const InterpolationOptions& options) {
  if (table.records.empty()) {
    throw Error(ErrorCode::InsufficientRecords, "empty table");
  }
  return interpolate_at(table, seconds_between(table.records.front().epoch(), t),
                        seconds_between(reference, t), options);
}

StateVector interpolate_state(const EphemerisTable& table, const CpfEpoch& t,
                              const InterpolationOptions& options) {
  if (table.records.empty()) {
    throw Error(ErrorCode::InsufficientRecords, "empty table");
  }
  return interpolate_state(table, t, table.records.front().epoch(), options);
}

Trajectory make_ephemeris_trajectory(std::shared_ptr<const EphemerisTable> table,
                                     const CpfEpoch& reference,
                                     const InterpolationOptions& options) {
  if (table->records.empty()) {
    throw Error(ErrorCode::InsufficientRecords, "empty table");
  }
  const double reference_offset = seconds_between(table->records.front().epoch(), reference);
  return [table = std::move(table), reference_offset, options](double t) {
    return interpolate_at(*table, reference_offset + t, t, options);
  };
}

}  // namespace lpisim
