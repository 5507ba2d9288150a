#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loadlens/calendar.hpp"
#include "loadlens/fixed.hpp"
#include "loadlens/ingest.hpp"

namespace loadlens {

/// Aggregate load per hour, in millesimals so hour sums are exact and
/// shard-order independent.
struct GrossSeries {
  enum class Source { FleetAggregate, External };

  std::vector<std::int64_t> values_milli;
  Source source = Source::FleetAggregate;

  int hours_in_year() const { return static_cast<int>(values_milli.size()); }
};

/// Per-hour sum over the fleet; missing values contribute 0. An empty fleet
/// yields an all-zero series (callers decide whether to warn).
GrossSeries aggregate_gross(std::span<const CleanProfile> profiles,
                            int hours_in_year = kDefaultHoursInYear,
                            int workers = 1);

/// The top-floor(fraction * H) gross-load hours with a monthly breakdown.
struct PeakCalendar {
  double fraction = 0.0;
  std::vector<std::int32_t> hours;  // ascending
  std::array<int, 12> monthly_counts{};
  int hours_in_year = kDefaultHoursInYear;

  bool contains(std::int32_t hour) const;

  /// Disjoint month subsets whose union is `hours`.
  std::array<std::vector<std::int32_t>, 12> monthly_partition(
      const MonthCalendar& calendar) const;
};

/// Selects the floor(fraction * H) highest-load hours; ties broken toward the
/// earlier hour index. fraction must lie in (0, 1).
PeakCalendar select_peak_hours(const GrossSeries& gross, double fraction,
                               const MonthCalendar& calendar);

/// The count rule shared by peak selection and LDC windows.
std::size_t peak_hour_count(double fraction, int hours_in_year);

/// External gross CSV: header `hour,kwh`, one row per hour.
GrossSeries read_gross_csv(std::istream& in,
                           int hours_in_year = kDefaultHoursInYear);

std::string peak_calendar_json(const PeakCalendar& calendar);

/// Month-by-month peak-hour tally: `month,peak_hours` rows plus a total row.
void write_monthly_counts_csv(std::ostream& out,
                              const std::array<int, 12>& monthly_counts);

}  // namespace loadlens
