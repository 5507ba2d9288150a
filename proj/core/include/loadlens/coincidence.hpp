#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loadlens/calendar.hpp"
#include "loadlens/ingest.hpp"
#include "loadlens/taxonomy.hpp"

namespace loadlens {

/// Per-hour threshold-exceedance counts for one category. Probabilities are
/// exact integer ratios; households missing the hour leave the denominator.
struct CoincidenceSeries {
  CategoryCode category;
  double threshold_kwh = 0.0;
  std::int32_t threshold_milli = 0;
  std::vector<std::int32_t> exceed;
  std::vector<std::int32_t> denom;

  std::optional<double> probability(std::size_t hour) const {
    if (denom[hour] == 0) return std::nullopt;
    return static_cast<double>(exceed[hour]) /
           static_cast<double>(denom[hour]);
  }
};

/// Fraction of households per hour whose present value strictly exceeds the
/// threshold. threshold_kwh must be positive.
CoincidenceSeries exceedance_series(const CategoryCode& category,
                                    std::span<const CleanProfile* const> group,
                                    double threshold_kwh,
                                    int hours_in_year = kDefaultHoursInYear,
                                    int workers = 1);

/// Year-average exceedance of a matched category at each threshold, as the
/// pooled ratio over all (household, hour) observations: the false-positive
/// floor of the charging proxy.
struct BaselineRate {
  double threshold_kwh = 0.0;
  std::int64_t exceed_total = 0;
  std::int64_t denom_total = 0;

  double year_average() const {
    return denom_total == 0
               ? 0.0
               : static_cast<double>(exceed_total) /
                     static_cast<double>(denom_total);
  }
};

std::vector<BaselineRate> baseline_rates(
    std::span<const CleanProfile* const> group,
    std::span<const double> thresholds_kwh,
    int hours_in_year = kDefaultHoursInYear);

/// Afternoon window is clock 15-19 inclusive.
inline constexpr int kAfternoonFirstClock = 15;
inline constexpr int kAfternoonLastClock = 19;

struct CoincidenceSummary {
  double year_max = 0.0;
  std::int32_t year_max_hour = -1;
  std::optional<double> afternoon_min;
  std::optional<double> afternoon_max;
  std::array<std::optional<double>, 12> monthly_means;
  std::optional<double> holiday_mean;
  std::optional<double> annual_mean;
};

/// Summarizes the hourly probabilities: year maximum, afternoon [min, max]
/// across days, per-month means and the mean over a holiday day window
/// (0-based, inclusive bounds).
CoincidenceSummary coincidence_summary(const CoincidenceSeries& series,
                                       const MonthCalendar& months,
                                       int holiday_first_day,
                                       int holiday_last_day);

void write_coincidence_csv(std::ostream& out, const CoincidenceSeries& series);
std::string coincidence_summary_json(const CoincidenceSummary& summary);

}  // namespace loadlens
