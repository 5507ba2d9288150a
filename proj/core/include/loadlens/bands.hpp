#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "loadlens/ingest.hpp"
#include "loadlens/taxonomy.hpp"

namespace loadlens {

inline constexpr int kBandQuantileCount = 19;  // 5%, 10%, ..., 95%

/// Distribution of one clock hour across a category's households:
/// nearest-rank quantile grid, mean, median and population std.
struct HourBand {
  std::array<double, kBandQuantileCount> quantiles_kwh{};
  double mean_kwh = 0.0;
  double median_kwh = 0.0;
  double std_kwh = 0.0;
  std::int64_t n_obs = 0;
};

struct DayBandProfile {
  CategoryCode category;
  int day_of_year = 0;
  std::array<std::optional<HourBand>, 24> hours;  // absent: no observations
};

/// Builds the 24 clock-hour distributions of one day (0-based day-of-year)
/// over a category's households; missing values are excluded from that
/// hour's sample. Throws DomainError when the day is out of range or the
/// category is empty.
DayBandProfile day_bands(const CategoryCode& category,
                         std::span<const CleanProfile* const> group,
                         int day_of_year);

/// Right-skew diagnostics of an hour sample: mean minus median, and the
/// third standardized moment (absent when the std is zero). Requires n >= 3.
struct SkewDiagnostic {
  double mean_median_gap = 0.0;
  std::optional<double> third_moment;
};

SkewDiagnostic skewness_diagnostic(std::span<const double> sample);

/// CSV layout: hour,q05,...,q95,mean,median,std,n (one row per clock hour,
/// empty band columns when the hour has no observations).
void write_day_bands_csv(std::ostream& out, const DayBandProfile& bands);

}  // namespace loadlens
