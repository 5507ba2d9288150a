#include "loadlens/coincidence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "loadlens/errors.hpp"
#include "loadlens/parallel.hpp"

namespace loadlens {

CoincidenceSeries exceedance_series(const CategoryCode& category,
                                    std::span<const CleanProfile* const> group,
                                    double threshold_kwh, int hours_in_year,
                                    int workers) {
  if (!(threshold_kwh > 0.0)) {
    throw DomainError("exceedance_series: threshold must be positive");
  }
  CoincidenceSeries series;
  series.category = category;
  series.threshold_kwh = threshold_kwh;
  series.threshold_milli =
      static_cast<std::int32_t>(std::llround(threshold_kwh * 1000.0));
  const std::size_t hours = static_cast<std::size_t>(hours_in_year);
  series.exceed.assign(hours, 0);
  series.denom.assign(hours, 0);

  struct Counts {
    std::vector<std::int32_t> exceed, denom;
  };
  std::vector<Counts> partials(static_cast<std::size_t>(std::max(1, workers)));
  parallel_shards(group.size(), workers,
                  [&](std::size_t shard, std::size_t begin, std::size_t end) {
                    Counts& c = partials[shard];
                    c.exceed.assign(hours, 0);
                    c.denom.assign(hours, 0);
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto& values = group[i]->values_milli;
                      for (std::size_t h = 0; h < hours; ++h) {
                        std::int32_t v = values[h];
                        if (v < 0) continue;
                        ++c.denom[h];
                        if (v > series.threshold_milli) ++c.exceed[h];
                      }
                    }
                  });
  for (const Counts& c : partials) {
    if (c.denom.empty()) continue;
    for (std::size_t h = 0; h < hours; ++h) {
      series.exceed[h] += c.exceed[h];
      series.denom[h] += c.denom[h];
    }
  }
  return series;
}

std::vector<BaselineRate> baseline_rates(
    std::span<const CleanProfile* const> group,
    std::span<const double> thresholds_kwh, int hours_in_year) {
  std::vector<BaselineRate> out;
  out.reserve(thresholds_kwh.size());
  for (double threshold : thresholds_kwh) {
    if (!(threshold > 0.0)) {
      throw DomainError("baseline_rates: thresholds must be positive");
    }
    const std::int32_t threshold_milli =
        static_cast<std::int32_t>(std::llround(threshold * 1000.0));
    BaselineRate rate;
    rate.threshold_kwh = threshold;
    for (const CleanProfile* p : group) {
      for (int h = 0; h < hours_in_year; ++h) {
        std::int32_t v = p->values_milli[static_cast<std::size_t>(h)];
        if (v < 0) continue;
        ++rate.denom_total;
        if (v > threshold_milli) ++rate.exceed_total;
      }
    }
    out.push_back(rate);
  }
  return out;
}

CoincidenceSummary coincidence_summary(const CoincidenceSeries& series,
                                       const MonthCalendar& months,
                                       int holiday_first_day,
                                       int holiday_last_day) {
  CoincidenceSummary summary;
  const std::size_t hours = series.denom.size();

  double annual_sum = 0.0;
  std::int64_t annual_n = 0;
  std::array<double, 12> month_sum{};
  std::array<std::int64_t, 12> month_n{};
  double holiday_sum = 0.0;
  std::int64_t holiday_n = 0;

  for (std::size_t h = 0; h < hours; ++h) {
    auto p = series.probability(h);
    if (!p.has_value()) continue;
    if (*p > summary.year_max ||
        (summary.year_max_hour < 0 && *p == summary.year_max)) {
      summary.year_max = *p;
      summary.year_max_hour = static_cast<std::int32_t>(h);
    }
    annual_sum += *p;
    ++annual_n;

    const int clock = static_cast<int>(h % kHoursPerDay);
    if (clock >= kAfternoonFirstClock && clock <= kAfternoonLastClock) {
      if (!summary.afternoon_min || *p < *summary.afternoon_min)
        summary.afternoon_min = *p;
      if (!summary.afternoon_max || *p > *summary.afternoon_max)
        summary.afternoon_max = *p;
    }

    const int month = months.month_of_hour(static_cast<std::int64_t>(h));
    month_sum[static_cast<std::size_t>(month)] += *p;
    ++month_n[static_cast<std::size_t>(month)];

    const int day = static_cast<int>(h / kHoursPerDay);
    if (day >= holiday_first_day && day <= holiday_last_day) {
      holiday_sum += *p;
      ++holiday_n;
    }
  }

  if (annual_n > 0) summary.annual_mean = annual_sum / annual_n;
  for (std::size_t m = 0; m < 12; ++m) {
    if (month_n[m] > 0) summary.monthly_means[m] = month_sum[m] / month_n[m];
  }
  if (holiday_n > 0) summary.holiday_mean = holiday_sum / holiday_n;
  return summary;
}

void write_coincidence_csv(std::ostream& out,
                           const CoincidenceSeries& series) {
  out << "hour,threshold_kwh,p_exceed,n_denominator\n";
  char buf[64];
  for (std::size_t h = 0; h < series.denom.size(); ++h) {
    auto p = series.probability(h);
    if (p.has_value()) {
      std::snprintf(buf, sizeof(buf), "%zu,%.3f,%.8f,%d", h,
                    series.threshold_kwh, *p, series.denom[h]);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.3f,,0", h, series.threshold_kwh);
    }
    out << buf << '\n';
  }
}

std::string coincidence_summary_json(const CoincidenceSummary& summary) {
  nlohmann::ordered_json j;
  j["year_max"] = summary.year_max;
  j["year_max_hour"] = summary.year_max_hour;
  if (summary.afternoon_min) j["afternoon_min"] = *summary.afternoon_min;
  if (summary.afternoon_max) j["afternoon_max"] = *summary.afternoon_max;
  nlohmann::ordered_json monthly = nlohmann::ordered_json::array();
  for (const auto& m : summary.monthly_means) {
    if (m.has_value()) {
      monthly.push_back(*m);
    } else {
      monthly.push_back(nullptr);
    }
  }
  j["monthly_means"] = monthly;
  if (summary.holiday_mean) j["holiday_mean"] = *summary.holiday_mean;
  if (summary.annual_mean) j["annual_mean"] = *summary.annual_mean;
  return j.dump(2) + "\n";
}

}  // namespace loadlens
