#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loadlens/calendar.hpp"
#include "loadlens/fixed.hpp"

namespace loadlens {

/// Profiles with more than this many missing or faulty hours are rejected.
inline constexpr int kMaxGapHours = 1000;

/// One row of the readings CSV. kwh_milli is empty when the field did not
/// parse as a decimal at 0.001 kWh resolution (the "unparseable" marker).
struct RawReading {
  std::string meter_id;
  std::int32_t hour = 0;
  std::optional<std::int32_t> kwh_milli;
};

struct ParseDiagnostic {
  std::size_t line_no = 0;
  std::string message;
};

struct ReadingsParse {
  std::vector<RawReading> readings;
  std::vector<ParseDiagnostic> diagnostics;
};

/// One household's cleaned hourly series. Absent slots (missing rows or
/// faulty entries) are kAbsent; present values lie in (0, kValueCapMilli].
struct CleanProfile {
  static constexpr std::int32_t kAbsent = -1;

  std::string meter_id;
  std::vector<std::int32_t> values_milli;
  std::int32_t valid_count = 0;
  std::int32_t gap_count = 0;
  std::int64_t annual_raw_milli = 0;
  double annual_corrected_kwh = 0.0;

  int hours_in_year() const { return static_cast<int>(values_milli.size()); }
  bool present(int hour) const {
    return values_milli[static_cast<std::size_t>(hour)] >= 0;
  }
  double annual_raw_kwh() const { return kwh_from_milli(annual_raw_milli); }
};

struct Rejection {
  std::string meter_id;
  std::int32_t gap_count = 0;
};

struct FaultTally {
  std::int64_t over_cap = 0;
  std::int64_t non_positive = 0;
  std::int64_t unparseable = 0;
  std::int64_t duplicate = 0;

  void merge(const FaultTally& other) {
    over_cap += other.over_cap;
    non_positive += other.non_positive;
    unparseable += other.unparseable;
    duplicate += other.duplicate;
  }
};

/// Dataset-level cleaning outcome. Shards partitioned by meter_id merge
/// commutatively by count addition.
struct CleaningReport {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  FaultTally faults;
  std::int64_t rejected_excess_gaps = 0;

  void merge(const CleaningReport& other) {
    accepted += other.accepted;
    rejected += other.rejected;
    faults.merge(other.faults);
    rejected_excess_gaps += other.rejected_excess_gaps;
  }
};

std::string cleaning_report_json(const CleaningReport& report);

struct ProfileOutcome {
  std::variant<CleanProfile, Rejection> result;
  FaultTally faults;

  bool accepted() const { return std::holds_alternative<CleanProfile>(result); }
  const CleanProfile& profile() const { return std::get<CleanProfile>(result); }
  const Rejection& rejection() const { return std::get<Rejection>(result); }
};

/// Applies the cleaning rules to one meter's readings: values above the cap,
/// non-positive values and unparseable markers become absent faulty hours;
/// duplicate hours keep the first occurrence (stream order) and count the
/// rest as faulty-duplicate; the profile is rejected iff gap_count exceeds
/// kMaxGapHours.
ProfileOutcome assemble_profile(std::string meter_id,
                                std::span<const RawReading> readings,
                                int hours_in_year = kDefaultHoursInYear);

/// Builds a profile from an already-positioned value series (one slot per
/// hour, absent = no reading). Shares the cap/non-positive flagging with
/// assemble_profile; used by the synthetic generator to close the loop
/// without a CSV detour.
ProfileOutcome assemble_from_values(std::string meter_id,
                                    std::span<const std::int32_t> slots_milli);

/// Upward-only yearly total correction: raw + gap_count * (raw / valid_count),
/// in kWh. Seasonality is deliberately ignored. Throws DomainError when the
/// profile has no valid hours.
double correct_annual_total(const CleanProfile& profile);

/// Parses the readings CSV (`meter_id,hour,kwh`). Throws FormatError when the
/// header is missing or wrong; malformed rows become diagnostics, never
/// silent drops. Rows with an unparseable kwh field still yield a reading
/// (with the marker) plus a diagnostic.
ReadingsParse parse_readings(std::istream& in,
                             int hours_in_year = kDefaultHoursInYear);

struct IngestResult {
  std::vector<CleanProfile> profiles;   // sorted by meter_id
  std::vector<Rejection> rejections;    // sorted by meter_id
  CleaningReport report;
  std::vector<ParseDiagnostic> diagnostics;
};

/// Streaming ingestion: single pass over the CSV, one builder per meter,
/// equivalent to parse_readings + per-meter assemble_profile.
IngestResult ingest_readings(std::istream& in,
                             int hours_in_year = kDefaultHoursInYear);

/// Serializes profiles back to the readings format (present hours only,
/// meter then hour order). Re-ingesting reproduces values, counts and sums
/// bit-for-bit.
void write_readings_csv(std::ostream& out,
                        std::span<const CleanProfile> profiles);

}  // namespace loadlens
