#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loadlens/calendar.hpp"
#include "loadlens/ingest.hpp"
#include "loadlens/peaks.hpp"
#include "loadlens/taxonomy.hpp"

namespace loadlens {

/// Mergeable count/sum/sum-of-squares state in exact integer millesimals.
/// Mean and population standard deviation are derived on demand; any shard
/// partitioning or merge order yields identical state bit-for-bit.
struct StreamAccumulator {
  std::int64_t count = 0;
  std::int64_t sum_milli = 0;
  std::int64_t sumsq_milli2 = 0;

  void add(std::int32_t value_milli) {
    ++count;
    sum_milli += value_milli;
    sumsq_milli2 += static_cast<std::int64_t>(value_milli) * value_milli;
  }

  void merge(const StreamAccumulator& other) {
    count += other.count;
    sum_milli += other.sum_milli;
    sumsq_milli2 += other.sumsq_milli2;
  }

  double mean_kwh() const;
  /// Population variance (divide by N), via the exact integer numerator
  /// N * sum_sq - sum^2 carried in 128-bit arithmetic.
  double variance_kwh2() const;
  double stddev_kwh() const;
};

struct SubsetStats {
  std::int64_t n_obs = 0;
  double mean_kwh = 0.0;
  double std_kwh = 0.0;
};

/// Profiles of one category, joined by meter_id. Members without an accepted
/// profile contribute no observations.
using CategoryGroups =
    std::map<CategoryCode, std::vector<const CleanProfile*>>;

CategoryGroups group_profiles(const CategoryTable& table,
                              std::span<const CleanProfile> profiles);

/// Per-category peak-hour statistics: one entry per month with peak hours
/// plus the whole-year entry for the calendar's fraction. Subsets with zero
/// observations are absent, not zero.
struct CategoryPeakStats {
  std::array<std::optional<SubsetStats>, 12> monthly;
  std::optional<SubsetStats> yearly;
};

struct PeakStatReport {
  double fraction = 0.0;
  std::map<CategoryCode, CategoryPeakStats> by_category;
};

PeakStatReport peak_stats(const CategoryGroups& groups,
                          const PeakCalendar& calendar,
                          const MonthCalendar& months, int workers = 1);

/// Whole-year peak statistics per category at several nested levels
/// (typically 20% / 5% / 1%); the non-resampled analogue feeding the Welch
/// protocol. Variance is population-convention here.
struct LevelEntry {
  std::int64_t n_obs = 0;
  double mean_kwh = 0.0;
  double variance_kwh2 = 0.0;
};

struct YearlyLevelStats {
  std::vector<double> fractions;
  std::map<CategoryCode, std::vector<std::optional<LevelEntry>>> by_category;
};

YearlyLevelStats yearly_level_stats(const CategoryGroups& groups,
                                    std::span<const PeakCalendar> calendars,
                                    int workers = 1);

/// Average hourly consumption per category from upward-corrected annual
/// totals: sum(corrected) / (households * H).
struct AnnualStatReport {
  struct Entry {
    double avg_hourly_kwh = 0.0;
    std::int64_t households = 0;
  };
  std::map<CategoryCode, Entry> by_category;
};

AnnualStatReport annual_means(const CategoryGroups& groups);

/// Distribution of per-household yearly maxima per category.
struct MaxReport {
  struct Entry {
    std::int64_t households = 0;
    double median_kwh = 0.0;
    double p98_kwh = 0.0;
    double p99_kwh = 0.0;
    std::int32_t bin_width_milli = 500;
    std::vector<std::int64_t> histogram;  // [i*width, (i+1)*width)
  };
  std::map<CategoryCode, Entry> by_category;
};

MaxReport household_maxima(const CategoryGroups& groups);

/// Nearest-rank quantile of a sorted sample: the ceil(pct/100 * n)-th order
/// statistic. Quantile levels are whole percents everywhere in this project,
/// so the rank is computed in exact integer arithmetic.
std::int32_t nearest_rank_pct(std::span<const std::int32_t> sorted, int pct);

void write_peak_stats_csv(std::ostream& out, const PeakStatReport& report,
                          const CategoryScheme& scheme);
void write_level_stats_csv(std::ostream& out, const YearlyLevelStats& levels,
                           const CategoryScheme& scheme);
void write_annual_means_csv(std::ostream& out, const AnnualStatReport& report,
                            const CategoryScheme& scheme);
void write_maxima_csv(std::ostream& out, const MaxReport& report,
                      const CategoryScheme& scheme);
std::string max_report_json(const MaxReport& report,
                            const CategoryScheme& scheme);

/// Label for a yearly level row, e.g. fraction 0.2 -> "y20pct".
std::string level_label(double fraction);

}  // namespace loadlens
