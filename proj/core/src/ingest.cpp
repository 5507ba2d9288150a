#include "loadlens/ingest.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "loadlens/csv.hpp"
#include "loadlens/errors.hpp"

namespace loadlens {

namespace {

constexpr std::int32_t kSlotUnseen = -1;
constexpr std::int32_t kSlotFaulty = -2;

// Per-meter accumulation of hour slots. Slot values: >=0 accepted millesimal,
// kSlotUnseen (no row yet), kSlotFaulty (first row for the hour was faulty).
struct MeterBuilder {
  std::vector<std::int32_t> slots;
  FaultTally faults;

  explicit MeterBuilder(int hours_in_year)
      : slots(static_cast<std::size_t>(hours_in_year), kSlotUnseen) {}

  void add(std::int32_t hour, std::optional<std::int32_t> milli) {
    std::int32_t& slot = slots[static_cast<std::size_t>(hour)];
    if (slot != kSlotUnseen) {
      // First occurrence wins; anything after is a duplicate no matter its value.
      ++faults.duplicate;
      return;
    }
    if (!milli.has_value()) {
      ++faults.unparseable;
      slot = kSlotFaulty;
    } else if (*milli <= 0) {
      ++faults.non_positive;
      slot = kSlotFaulty;
    } else if (*milli > kValueCapMilli) {
      ++faults.over_cap;
      slot = kSlotFaulty;
    } else {
      slot = *milli;
    }
  }

  ProfileOutcome finalize(std::string meter_id) && {
    ProfileOutcome out;
    out.faults = faults;
    std::int32_t valid = 0;
    std::int64_t raw = 0;
    for (std::int32_t& s : slots) {
      if (s >= 0) {
        ++valid;
        raw += s;
      } else {
        s = CleanProfile::kAbsent;
      }
    }
    std::int32_t gaps = static_cast<std::int32_t>(slots.size()) - valid;
    if (gaps > kMaxGapHours) {
      out.result = Rejection{std::move(meter_id), gaps};
      return out;
    }
    CleanProfile profile;
    profile.meter_id = std::move(meter_id);
    profile.values_milli = std::move(slots);
    profile.valid_count = valid;
    profile.gap_count = gaps;
    profile.annual_raw_milli = raw;
    double raw_kwh = kwh_from_milli(raw);
    profile.annual_corrected_kwh =
        valid > 0 ? raw_kwh + static_cast<double>(gaps) * (raw_kwh / valid)
                  : 0.0;
    out.result = std::move(profile);
    return out;
  }
};

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

const std::string_view kReadingsHeader = "meter_id,hour,kwh";

// Parsed row or a diagnostic message. A row with an unparseable kwh carries
// both its fields and a value_note.
struct RowParse {
  std::string_view meter;
  std::int32_t hour = 0;
  std::optional<std::int32_t> milli;
  bool value_unparseable = false;
  std::string error;  // non-empty: no usable row
};

RowParse parse_row(std::string_view line, int hours_in_year) {
  RowParse row;
  std::string_view fields[4];
  int n = csv::split_into(line, fields, 4);
  if (n != 3) {
    row.error = "expected 3 fields (meter_id,hour,kwh)";
    return row;
  }
  if (fields[0].empty()) {
    row.error = "empty meter_id";
    return row;
  }
  auto hour = csv::parse_int(fields[1]);
  if (!hour.has_value()) {
    row.error = "hour is not an integer";
    return row;
  }
  if (*hour < 0 || *hour >= hours_in_year) {
    row.error = "hour " + std::to_string(*hour) + " out of range [0, " +
                std::to_string(hours_in_year - 1) + "]";
    return row;
  }
  row.meter = fields[0];
  row.hour = static_cast<std::int32_t>(*hour);
  auto milli = parse_milli(fields[2]);
  if (milli.has_value() && *milli >= INT32_MIN && *milli <= INT32_MAX) {
    row.milli = static_cast<std::int32_t>(*milli);
  } else {
    row.value_unparseable = true;
  }
  return row;
}

void require_header(csv::LineReader& reader, std::string& line) {
  if (!reader.next(line)) {
    throw FormatError("readings", 1, "missing header line '" +
                                         std::string(kReadingsHeader) + "'");
  }
  std::string_view got = line;
  if (!got.empty() && got.back() == '\r') got.remove_suffix(1);
  if (got != kReadingsHeader) {
    throw FormatError("readings", 1,
                      "bad header: expected '" + std::string(kReadingsHeader) +
                          "', got '" + line + "'");
  }
}

}  // namespace

ReadingsParse parse_readings(std::istream& in, int hours_in_year) {
  ReadingsParse out;
  csv::LineReader reader(in);
  std::string line;
  require_header(reader, line);
  while (reader.next(line)) {
    if (line.empty() || line == "\r") {
      out.diagnostics.push_back({reader.line_no(), "empty line"});
      continue;
    }
    RowParse row = parse_row(line, hours_in_year);
    if (!row.error.empty()) {
      out.diagnostics.push_back({reader.line_no(), row.error});
      continue;
    }
    if (row.value_unparseable) {
      out.diagnostics.push_back({reader.line_no(), "unparseable kwh value"});
    }
    out.readings.push_back(
        RawReading{std::string(row.meter), row.hour, row.milli});
  }
  return out;
}

ProfileOutcome assemble_profile(std::string meter_id,
                                std::span<const RawReading> readings,
                                int hours_in_year) {
  MeterBuilder builder(hours_in_year);
  for (const RawReading& r : readings) {
    builder.add(r.hour, r.kwh_milli);
  }
  return std::move(builder).finalize(std::move(meter_id));
}

ProfileOutcome assemble_from_values(std::string meter_id,
                                    std::span<const std::int32_t> slots_milli) {
  MeterBuilder builder(static_cast<int>(slots_milli.size()));
  for (std::size_t h = 0; h < slots_milli.size(); ++h) {
    std::int32_t v = slots_milli[h];
    if (v == CleanProfile::kAbsent) continue;  // missing, not a reading
    builder.add(static_cast<std::int32_t>(h), v);
  }
  return std::move(builder).finalize(std::move(meter_id));
}

double correct_annual_total(const CleanProfile& profile) {
  if (profile.valid_count == 0) {
    throw DomainError("correct_annual_total: profile '" + profile.meter_id +
                      "' has no valid hours");
  }
  double raw_kwh = profile.annual_raw_kwh();
  return raw_kwh + static_cast<double>(profile.gap_count) *
                       (raw_kwh / profile.valid_count);
}

IngestResult ingest_readings(std::istream& in, int hours_in_year) {
  IngestResult out;
  csv::LineReader reader(in);
  std::string line;
  require_header(reader, line);

  std::unordered_map<std::string, MeterBuilder, StringHash, std::equal_to<>>
      builders;
  while (reader.next(line)) {
    if (line.empty() || line == "\r") {
      out.diagnostics.push_back({reader.line_no(), "empty line"});
      continue;
    }
    RowParse row = parse_row(line, hours_in_year);
    if (!row.error.empty()) {
      out.diagnostics.push_back({reader.line_no(), row.error});
      continue;
    }
    if (row.value_unparseable) {
      out.diagnostics.push_back({reader.line_no(), "unparseable kwh value"});
    }
    auto it = builders.find(row.meter);
    if (it == builders.end()) {
      it = builders.emplace(std::string(row.meter), MeterBuilder(hours_in_year))
               .first;
    }
    it->second.add(row.hour, row.milli);
  }

  out.profiles.reserve(builders.size());
  for (auto& [meter, builder] : builders) {
    ProfileOutcome outcome = std::move(builder).finalize(meter);
    out.report.faults.merge(outcome.faults);
    if (outcome.accepted()) {
      ++out.report.accepted;
      out.profiles.push_back(std::move(std::get<CleanProfile>(outcome.result)));
    } else {
      ++out.report.rejected;
      ++out.report.rejected_excess_gaps;
      out.rejections.push_back(std::move(std::get<Rejection>(outcome.result)));
    }
  }
  std::sort(out.profiles.begin(), out.profiles.end(),
            [](const CleanProfile& a, const CleanProfile& b) {
              return a.meter_id < b.meter_id;
            });
  std::sort(out.rejections.begin(), out.rejections.end(),
            [](const Rejection& a, const Rejection& b) {
              return a.meter_id < b.meter_id;
            });
  return out;
}

std::string cleaning_report_json(const CleaningReport& report) {
  nlohmann::ordered_json j;
  j["accepted"] = report.accepted;
  j["rejected"] = report.rejected;
  j["faulty_over_cap"] = report.faults.over_cap;
  j["faulty_non_positive"] = report.faults.non_positive;
  j["faulty_unparseable"] = report.faults.unparseable;
  j["faulty_duplicate"] = report.faults.duplicate;
  j["rejected_excess_gaps"] = report.rejected_excess_gaps;
  return j.dump(2) + "\n";
}

void write_readings_csv(std::ostream& out,
                        std::span<const CleanProfile> profiles) {
  out << "meter_id,hour,kwh\n";
  std::string buf;
  for (const CleanProfile& p : profiles) {
    for (int h = 0; h < p.hours_in_year(); ++h) {
      std::int32_t v = p.values_milli[static_cast<std::size_t>(h)];
      if (v < 0) continue;
      buf.clear();
      buf += p.meter_id;
      buf.push_back(',');
      buf += std::to_string(h);
      buf.push_back(',');
      append_milli(buf, v);
      buf.push_back('\n');
      out << buf;
    }
  }
}

}  // namespace loadlens
