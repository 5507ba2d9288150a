#include "loadlens/bands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "loadlens/errors.hpp"
#include "loadlens/stats.hpp"

namespace loadlens {

DayBandProfile day_bands(const CategoryCode& category,
                         std::span<const CleanProfile* const> group,
                         int day_of_year) {
  if (group.empty()) {
    throw DomainError("day_bands: category has no profiles");
  }
  const int hours_in_year = group.front()->hours_in_year();
  const int first_hour = day_of_year * kHoursPerDay;
  if (day_of_year < 0 || first_hour + kHoursPerDay > hours_in_year) {
    throw DomainError("day_bands: day " + std::to_string(day_of_year) +
                      " outside the year");
  }

  DayBandProfile out;
  out.category = category;
  out.day_of_year = day_of_year;

  std::vector<std::int32_t> sample;
  sample.reserve(group.size());
  for (int clock = 0; clock < kHoursPerDay; ++clock) {
    const std::size_t h = static_cast<std::size_t>(first_hour + clock);
    sample.clear();
    StreamAccumulator acc;
    for (const CleanProfile* p : group) {
      std::int32_t v = p->values_milli[h];
      if (v < 0) continue;
      sample.push_back(v);
      acc.add(v);
    }
    if (sample.empty()) continue;
    std::sort(sample.begin(), sample.end());
    HourBand band;
    band.n_obs = acc.count;
    band.mean_kwh = acc.mean_kwh();
    band.std_kwh = acc.stddev_kwh();
    for (int q = 0; q < kBandQuantileCount; ++q) {
      band.quantiles_kwh[static_cast<std::size_t>(q)] =
          kwh_from_milli(nearest_rank_pct(sample, 5 * (q + 1)));
    }
    band.median_kwh = kwh_from_milli(nearest_rank_pct(sample, 50));
    out.hours[static_cast<std::size_t>(clock)] = band;
  }
  return out;
}

SkewDiagnostic skewness_diagnostic(std::span<const double> sample) {
  if (sample.size() < 3) {
    throw DomainError("skewness_diagnostic: need at least 3 observations");
  }
  const double n = static_cast<double>(sample.size());
  double sum = 0.0;
  for (double v : sample) sum += v;
  const double mean = sum / n;

  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t rank = (sorted.size() + 1) / 2;  // ceil(n/2)
  const double median = sorted[rank - 1];

  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;

  SkewDiagnostic diag;
  diag.mean_median_gap = mean - median;
  if (m2 > 0.0) {
    diag.third_moment = m3 / std::pow(m2, 1.5);
  }
  return diag;
}

void write_day_bands_csv(std::ostream& out, const DayBandProfile& bands) {
  out << "hour";
  for (int q = 0; q < kBandQuantileCount; ++q) {
    char head[8];
    std::snprintf(head, sizeof(head), ",q%02d", 5 * (q + 1));
    out << head;
  }
  out << ",mean,median,std,n\n";

  char buf[32];
  for (int clock = 0; clock < kHoursPerDay; ++clock) {
    out << clock;
    const auto& band = bands.hours[static_cast<std::size_t>(clock)];
    if (!band.has_value()) {
      for (int q = 0; q < kBandQuantileCount + 3; ++q) out << ',';
      out << ",0\n";
      continue;
    }
    for (double q : band->quantiles_kwh) {
      std::snprintf(buf, sizeof(buf), ",%.3f", q);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.6f", band->mean_kwh);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.3f", band->median_kwh);
    out << buf;
    std::snprintf(buf, sizeof(buf), ",%.6f", band->std_kwh);
    out << buf << ',' << band->n_obs << '\n';
  }
}

}  // namespace loadlens
