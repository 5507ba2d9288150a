#include "loadlens/ldc.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>

#include <json.hpp>

#include "loadlens/errors.hpp"

namespace loadlens {

LoadDurationCurve build_ldc(std::span<const double> series_kwh) {
  LoadDurationCurve ldc;
  ldc.values_kwh.assign(series_kwh.begin(), series_kwh.end());
  std::stable_sort(ldc.values_kwh.begin(), ldc.values_kwh.end(),
                   std::greater<double>());
  return ldc;
}

PeakWindowStats peak_window_stats(const LoadDurationCurve& ldc,
                                  double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("peak_window_stats: fraction must lie in (0, 1)");
  }
  const std::size_t hours = ldc.values_kwh.size();
  std::size_t window = peak_hour_count(fraction, static_cast<int>(hours));
  if (window == 0 || window > hours) {
    throw DomainError("peak_window_stats: window is empty");
  }
  PeakWindowStats stats;
  stats.fraction = fraction;
  stats.window = window;
  stats.max_kwh = ldc.values_kwh.front();
  double sum = 0.0;
  for (std::size_t i = 0; i < window; ++i) sum += ldc.values_kwh[i];
  stats.mean_kwh = sum / static_cast<double>(window);
  // Median = ceil(w/2)-th order statistic ascending; the curve is descending,
  // so that is index w - ceil(w/2).
  const std::size_t rank = (window + 1) / 2;
  stats.median_kwh = ldc.values_kwh[window - rank];
  return stats;
}

ExtrapolationResult extrapolate_adoption(
    const GrossSeries& gross, std::span<const std::int64_t> base_agg_milli,
    std::span<const std::int64_t> adopter_agg_milli,
    const AdoptionScenario& scenario, double window_fraction) {
  const std::size_t hours = gross.values_milli.size();
  if (base_agg_milli.size() != hours || adopter_agg_milli.size() != hours) {
    throw DomainError("extrapolate_adoption: series lengths differ");
  }
  if (scenario.n_base < 1 || scenario.n_adopter < 1) {
    throw DomainError("extrapolate_adoption: household counts must be >= 1");
  }
  const double r = scenario.ratio();

  ExtrapolationResult result;
  result.up_kwh.resize(hours);
  for (std::size_t h = 0; h < hours; ++h) {
    const double up_milli =
        static_cast<double>(gross.values_milli[h] - base_agg_milli[h]) +
        r * static_cast<double>(adopter_agg_milli[h]);
    result.up_kwh[h] = up_milli / 1000.0;
    if (up_milli < 0.0) {
      result.negative_hours.push_back(static_cast<std::int32_t>(h));
    }
  }
  result.up_ldc = build_ldc(result.up_kwh);
  result.stats = peak_window_stats(result.up_ldc, window_fraction);
  return result;
}

ScenarioComparison compare_windows(const PeakWindowStats& a,
                                   const PeakWindowStats& b) {
  auto pct = [](double x, double base) {
    if (base == 0.0) {
      throw DomainError("compare_windows: zero denominator");
    }
    return (x - base) / base * 100.0;
  };
  ScenarioComparison cmp;
  cmp.max_pct = pct(a.max_kwh, b.max_kwh);
  cmp.mean_pct = pct(a.mean_kwh, b.mean_kwh);
  cmp.median_pct = pct(a.median_kwh, b.median_kwh);
  return cmp;
}

void write_up_series_csv(std::ostream& out, const GrossSeries& gross,
                         std::span<const double> up_kwh) {
  out << "hour,gross_kwh,up_kwh\n";
  char buf[96];
  for (std::size_t h = 0; h < up_kwh.size(); ++h) {
    std::snprintf(buf, sizeof(buf), "%zu,%.3f,%.6f", h,
                  static_cast<double>(gross.values_milli[h]) / 1000.0,
                  up_kwh[h]);
    out << buf << '\n';
  }
}

void write_ldc_csv(std::ostream& out, const LoadDurationCurve& ldc) {
  out << "rank,ldc_kwh\n";
  char buf[64];
  for (std::size_t i = 0; i < ldc.values_kwh.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f", i, ldc.values_kwh[i]);
    out << buf << '\n';
  }
}

std::string window_stats_json(const PeakWindowStats& stats,
                              std::span<const std::int32_t> negative_hours,
                              bool as_mwh) {
  const double scale = as_mwh ? 1e-3 : 1.0;
  nlohmann::ordered_json j;
  j["max"] = stats.max_kwh * scale;
  j["mean"] = stats.mean_kwh * scale;
  j["median"] = stats.median_kwh * scale;
  j["window_fraction"] = stats.fraction;
  j["unit"] = as_mwh ? "MWh" : "kWh";
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  if (!negative_hours.empty()) {
    nlohmann::ordered_json w;
    w["negative_hours"] = negative_hours;
    warnings.push_back(w);
  }
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

}  // namespace loadlens
