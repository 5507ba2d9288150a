#include "loadlens/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "loadlens/csv.hpp"
#include "loadlens/errors.hpp"
#include "loadlens/parallel.hpp"

namespace loadlens {

GrossSeries aggregate_gross(std::span<const CleanProfile> profiles,
                            int hours_in_year, int workers) {
  for (const CleanProfile& p : profiles) {
    if (p.hours_in_year() != hours_in_year) {
      throw DomainError("aggregate_gross: profile '" + p.meter_id +
                        "' has a different hour axis");
    }
  }
  GrossSeries gross;
  gross.values_milli.assign(static_cast<std::size_t>(hours_in_year), 0);

  workers = std::max(1, workers);
  std::vector<std::vector<std::int64_t>> partials(
      static_cast<std::size_t>(workers));
  parallel_shards(profiles.size(), workers,
                  [&](std::size_t shard, std::size_t begin, std::size_t end) {
                    auto& sums = partials[shard];
                    sums.assign(static_cast<std::size_t>(hours_in_year), 0);
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto& values = profiles[i].values_milli;
                      for (std::size_t h = 0; h < values.size(); ++h) {
                        if (values[h] >= 0) sums[h] += values[h];
                      }
                    }
                  });
  for (const auto& sums : partials) {
    if (sums.empty()) continue;
    for (std::size_t h = 0; h < gross.values_milli.size(); ++h) {
      gross.values_milli[h] += sums[h];
    }
  }
  return gross;
}

std::size_t peak_hour_count(double fraction, int hours_in_year) {
  // floor(fraction * H); the epsilon absorbs binary representation error in
  // decimal fractions (0.29 * 100 must select 29 hours, not 28).
  return static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(hours_in_year) + 1e-9));
}

PeakCalendar select_peak_hours(const GrossSeries& gross, double fraction,
                               const MonthCalendar& calendar) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("select_peak_hours: fraction must lie in (0, 1)");
  }
  const int hours = gross.hours_in_year();
  std::vector<std::int32_t> order(static_cast<std::size_t>(hours));
  std::iota(order.begin(), order.end(), 0);
  std::size_t count = peak_hour_count(fraction, hours);
  const auto& load = gross.values_milli;
  auto higher = [&](std::int32_t a, std::int32_t b) {
    std::int64_t la = load[static_cast<std::size_t>(a)];
    std::int64_t lb = load[static_cast<std::size_t>(b)];
    if (la != lb) return la > lb;
    return a < b;
  };
  if (count < order.size()) {
    std::nth_element(order.begin(),
                     order.begin() + static_cast<std::ptrdiff_t>(count),
                     order.end(), higher);
    order.resize(count);
  }

  PeakCalendar out;
  out.fraction = fraction;
  out.hours_in_year = hours;
  out.hours.assign(order.begin(), order.end());
  std::sort(out.hours.begin(), out.hours.end());
  for (std::int32_t h : out.hours) {
    ++out.monthly_counts[static_cast<std::size_t>(calendar.month_of_hour(h))];
  }
  return out;
}

bool PeakCalendar::contains(std::int32_t hour) const {
  return std::binary_search(hours.begin(), hours.end(), hour);
}

std::array<std::vector<std::int32_t>, 12> PeakCalendar::monthly_partition(
    const MonthCalendar& calendar) const {
  std::array<std::vector<std::int32_t>, 12> subsets;
  for (std::int32_t h : hours) {
    subsets[static_cast<std::size_t>(calendar.month_of_hour(h))].push_back(h);
  }
  return subsets;
}

GrossSeries read_gross_csv(std::istream& in, int hours_in_year) {
  csv::LineReader reader(in);
  std::string line;
  if (!reader.next(line)) {
    throw FormatError("gross", 1, "missing header line 'hour,kwh'");
  }
  std::string_view got = line;
  if (!got.empty() && got.back() == '\r') got.remove_suffix(1);
  if (got != "hour,kwh") {
    throw FormatError("gross", 1, "bad header: expected 'hour,kwh'");
  }
  GrossSeries gross;
  gross.source = GrossSeries::Source::External;
  gross.values_milli.assign(static_cast<std::size_t>(hours_in_year), 0);
  std::vector<bool> seen(static_cast<std::size_t>(hours_in_year), false);
  while (reader.next(line)) {
    if (line.empty() || line == "\r") continue;
    std::string_view fields[3];
    if (csv::split_into(line, fields, 3) != 2) {
      throw FormatError("gross", reader.line_no(), "expected 2 fields (hour,kwh)");
    }
    auto hour = csv::parse_int(fields[0]);
    if (!hour.has_value() || *hour < 0 || *hour >= hours_in_year) {
      throw FormatError("gross", reader.line_no(), "hour out of range");
    }
    auto kwh = parse_milli(fields[1]);
    if (!kwh.has_value() || *kwh < 0) {
      throw FormatError("gross", reader.line_no(),
                        "kwh must be a non-negative decimal");
    }
    if (seen[static_cast<std::size_t>(*hour)]) {
      throw FormatError("gross", reader.line_no(),
                        "duplicate hour " + std::to_string(*hour));
    }
    seen[static_cast<std::size_t>(*hour)] = true;
    gross.values_milli[static_cast<std::size_t>(*hour)] = *kwh;
  }
  return gross;
}

std::string peak_calendar_json(const PeakCalendar& calendar) {
  nlohmann::ordered_json j;
  j["fraction"] = calendar.fraction;
  j["hours_in_year"] = calendar.hours_in_year;
  j["hours"] = calendar.hours;
  j["monthly_counts"] = calendar.monthly_counts;
  return j.dump(2) + "\n";
}

void write_monthly_counts_csv(std::ostream& out,
                              const std::array<int, 12>& monthly_counts) {
  out << "month,peak_hours\n";
  int total = 0;
  for (std::size_t m = 0; m < 12; ++m) {
    out << (m + 1) << ',' << monthly_counts[m] << '\n';
    total += monthly_counts[m];
  }
  out << "total," << total << '\n';
}

}  // namespace loadlens
