#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "loadlens/peaks.hpp"
#include "loadlens/taxonomy.hpp"

namespace loadlens {

/// Hourly series re-sorted to non-increasing order; same value multiset as
/// the source.
struct LoadDurationCurve {
  std::vector<double> values_kwh;
};

LoadDurationCurve build_ldc(std::span<const double> series_kwh);

/// Rollout scenario: the base category's aggregate is swapped for the
/// adopter category's, scaled by the household-count ratio.
struct AdoptionScenario {
  CategoryCode base_code;
  CategoryCode adopter_code;
  std::int64_t n_base = 0;
  std::int64_t n_adopter = 0;

  double ratio() const {
    return static_cast<double>(n_base) / static_cast<double>(n_adopter);
  }
};

struct PeakWindowStats {
  double fraction = 0.0;
  std::size_t window = 0;
  double max_kwh = 0.0;
  double mean_kwh = 0.0;
  double median_kwh = 0.0;
};

/// Stats over the top floor(fraction * H) entries of the curve.
PeakWindowStats peak_window_stats(const LoadDurationCurve& ldc,
                                  double fraction);

struct ExtrapolationResult {
  std::vector<double> up_kwh;  // gross - base + ratio * adopter, per hour
  LoadDurationCurve up_ldc;
  PeakWindowStats stats;
  std::vector<std::int32_t> negative_hours;  // nonempty => negativity warning
};

/// up(t) = gross(t) - base_agg(t) + r * adopter_agg(t). The identity
/// scenario (adopter == base, r = 1) reproduces gross bit-for-bit. Negative
/// hours are reported, not clamped.
ExtrapolationResult extrapolate_adoption(
    const GrossSeries& gross, std::span<const std::int64_t> base_agg_milli,
    std::span<const std::int64_t> adopter_agg_milli,
    const AdoptionScenario& scenario, double window_fraction);

/// Percentage differences (a vs b, in percent of b) of the window stats.
struct ScenarioComparison {
  double max_pct = 0.0;
  double mean_pct = 0.0;
  double median_pct = 0.0;
};

ScenarioComparison compare_windows(const PeakWindowStats& a,
                                   const PeakWindowStats& b);

void write_up_series_csv(std::ostream& out, const GrossSeries& gross,
                         std::span<const double> up_kwh);
void write_ldc_csv(std::ostream& out, const LoadDurationCurve& ldc);

/// Keys: max, mean, median, window_fraction, warnings. Values in MWh when
/// as_mwh is set (kWh otherwise).
std::string window_stats_json(const PeakWindowStats& stats,
                              std::span<const std::int32_t> negative_hours,
                              bool as_mwh);

}  // namespace loadlens
