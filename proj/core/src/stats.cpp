#include "loadlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

#include "loadlens/errors.hpp"
#include "loadlens/parallel.hpp"

namespace loadlens {

double StreamAccumulator::mean_kwh() const {
  if (count == 0) return 0.0;
  return static_cast<double>(sum_milli) /
         (1000.0 * static_cast<double>(count));
}

double StreamAccumulator::variance_kwh2() const {
  if (count == 0) return 0.0;
  using i128 = __int128;
  i128 numerator = static_cast<i128>(count) * static_cast<i128>(sumsq_milli2) -
                   static_cast<i128>(sum_milli) * static_cast<i128>(sum_milli);
  if (numerator < 0) numerator = 0;  // only possible through float paths; exact here
  double n = static_cast<double>(count);
  return static_cast<double>(numerator) / (n * n * 1e6);
}

double StreamAccumulator::stddev_kwh() const {
  return std::sqrt(variance_kwh2());
}

CategoryGroups group_profiles(const CategoryTable& table,
                              std::span<const CleanProfile> profiles) {
  std::unordered_map<std::string_view, const CleanProfile*> by_meter;
  by_meter.reserve(profiles.size());
  for (const CleanProfile& p : profiles) by_meter.emplace(p.meter_id, &p);

  CategoryGroups groups;
  for (const auto& [code, entry] : table.categories) {
    std::vector<const CleanProfile*> members;
    members.reserve(entry.members.size());
    for (const std::string& meter : entry.members) {
      auto it = by_meter.find(meter);
      if (it != by_meter.end()) members.push_back(it->second);
    }
    groups.emplace(code, std::move(members));
  }
  return groups;
}

namespace {

std::optional<SubsetStats> to_subset(const StreamAccumulator& acc) {
  if (acc.count == 0) return std::nullopt;
  return SubsetStats{acc.count, acc.mean_kwh(), acc.stddev_kwh()};
}

// 12 monthly accumulators + the yearly one, merged componentwise.
struct PeakAccumulators {
  std::array<StreamAccumulator, 12> monthly;
  StreamAccumulator yearly;

  void merge(const PeakAccumulators& other) {
    for (std::size_t m = 0; m < 12; ++m) monthly[m].merge(other.monthly[m]);
    yearly.merge(other.yearly);
  }
};

PeakAccumulators accumulate_group(std::span<const CleanProfile* const> group,
                                  const PeakCalendar& calendar,
                                  const MonthCalendar& months, int workers) {
  std::vector<std::int8_t> month_of_peak(calendar.hours.size());
  for (std::size_t i = 0; i < calendar.hours.size(); ++i) {
    month_of_peak[i] =
        static_cast<std::int8_t>(months.month_of_hour(calendar.hours[i]));
  }
  std::vector<PeakAccumulators> partials(
      static_cast<std::size_t>(std::max(1, workers)));
  parallel_shards(group.size(), workers,
                  [&](std::size_t shard, std::size_t begin, std::size_t end) {
                    PeakAccumulators& acc = partials[shard];
                    for (std::size_t i = begin; i < end; ++i) {
                      const auto& values = group[i]->values_milli;
                      for (std::size_t k = 0; k < calendar.hours.size(); ++k) {
                        std::int32_t v = values[static_cast<std::size_t>(
                            calendar.hours[k])];
                        if (v < 0) continue;
                        acc.monthly[static_cast<std::size_t>(month_of_peak[k])]
                            .add(v);
                        acc.yearly.add(v);
                      }
                    }
                  });
  PeakAccumulators total;
  for (const PeakAccumulators& p : partials) total.merge(p);
  return total;
}

}  // namespace

PeakStatReport peak_stats(const CategoryGroups& groups,
                          const PeakCalendar& calendar,
                          const MonthCalendar& months, int workers) {
  PeakStatReport report;
  report.fraction = calendar.fraction;
  for (const auto& [code, group] : groups) {
    PeakAccumulators acc = accumulate_group(group, calendar, months, workers);
    CategoryPeakStats entry;
    for (std::size_t m = 0; m < 12; ++m) {
      entry.monthly[m] = to_subset(acc.monthly[m]);
    }
    entry.yearly = to_subset(acc.yearly);
    report.by_category.emplace(code, std::move(entry));
  }
  return report;
}

YearlyLevelStats yearly_level_stats(const CategoryGroups& groups,
                                    std::span<const PeakCalendar> calendars,
                                    int workers) {
  YearlyLevelStats out;
  for (const PeakCalendar& c : calendars) out.fractions.push_back(c.fraction);
  for (const auto& [code, group] : groups) {
    std::vector<std::optional<LevelEntry>> entries;
    entries.reserve(calendars.size());
    for (const PeakCalendar& calendar : calendars) {
      MonthCalendar months(calendar.hours_in_year);
      PeakAccumulators acc = accumulate_group(group, calendar, months, workers);
      if (acc.yearly.count == 0) {
        entries.push_back(std::nullopt);
      } else {
        entries.push_back(LevelEntry{acc.yearly.count, acc.yearly.mean_kwh(),
                                     acc.yearly.variance_kwh2()});
      }
    }
    out.by_category.emplace(code, std::move(entries));
  }
  return out;
}

AnnualStatReport annual_means(const CategoryGroups& groups) {
  AnnualStatReport report;
  for (const auto& [code, group] : groups) {
    AnnualStatReport::Entry entry;
    entry.households = static_cast<std::int64_t>(group.size());
    double sum = 0.0;
    for (const CleanProfile* p : group) {
      sum += p->annual_corrected_kwh / p->hours_in_year();
    }
    entry.avg_hourly_kwh =
        group.empty() ? 0.0 : sum / static_cast<double>(group.size());
    report.by_category.emplace(code, entry);
  }
  return report;
}

std::int32_t nearest_rank_pct(std::span<const std::int32_t> sorted, int pct) {
  if (sorted.empty()) {
    throw DomainError("nearest_rank_pct: empty sample");
  }
  std::size_t n = sorted.size();
  std::size_t rank = (static_cast<std::size_t>(pct) * n + 99) / 100;
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

MaxReport household_maxima(const CategoryGroups& groups) {
  MaxReport report;
  for (const auto& [code, group] : groups) {
    std::vector<std::int32_t> maxima;
    maxima.reserve(group.size());
    for (const CleanProfile* p : group) {
      std::int32_t best = -1;
      for (std::int32_t v : p->values_milli) best = std::max(best, v);
      if (best >= 0) maxima.push_back(best);
    }
    if (maxima.empty()) continue;
    std::sort(maxima.begin(), maxima.end());
    MaxReport::Entry entry;
    entry.households = static_cast<std::int64_t>(maxima.size());
    entry.median_kwh = kwh_from_milli(nearest_rank_pct(maxima, 50));
    entry.p98_kwh = kwh_from_milli(nearest_rank_pct(maxima, 98));
    entry.p99_kwh = kwh_from_milli(nearest_rank_pct(maxima, 99));
    std::size_t bins = static_cast<std::size_t>(
        (kValueCapMilli + entry.bin_width_milli - 1) / entry.bin_width_milli);
    entry.histogram.assign(bins, 0);
    for (std::int32_t m : maxima) {
      std::size_t bin = static_cast<std::size_t>(m / entry.bin_width_milli);
      if (bin >= bins) bin = bins - 1;
      ++entry.histogram[bin];
    }
    report.by_category.emplace(code, std::move(entry));
  }
  return report;
}

namespace {

void append_fixed(std::string& out, double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  out += buf;
}

}  // namespace

std::string level_label(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "y%gpct", fraction * 100.0);
  return buf;
}

void write_peak_stats_csv(std::ostream& out, const PeakStatReport& report,
                          const CategoryScheme& scheme) {
  out << "category,month_or_level,mean_kwh,std_kwh,n_obs\n";
  std::string line;
  std::string level = level_label(report.fraction);
  for (const auto& [code, entry] : report.by_category) {
    std::string name = format_code(code, scheme);
    for (std::size_t m = 0; m < 12; ++m) {
      line = name;
      line += ",m";
      if (m + 1 < 10) line += '0';
      line += std::to_string(m + 1);
      line += ',';
      if (entry.monthly[m].has_value()) {
        append_fixed(line, entry.monthly[m]->mean_kwh, 6);
        line += ',';
        append_fixed(line, entry.monthly[m]->std_kwh, 6);
        line += ',';
        line += std::to_string(entry.monthly[m]->n_obs);
      } else {
        line += ",,0";
      }
      out << line << '\n';
    }
    line = name;
    line += ',';
    line += level;
    line += ',';
    if (entry.yearly.has_value()) {
      append_fixed(line, entry.yearly->mean_kwh, 6);
      line += ',';
      append_fixed(line, entry.yearly->std_kwh, 6);
      line += ',';
      line += std::to_string(entry.yearly->n_obs);
    } else {
      line += ",,0";
    }
    out << line << '\n';
  }
}

void write_level_stats_csv(std::ostream& out, const YearlyLevelStats& levels,
                           const CategoryScheme& scheme) {
  out << "category,level,mean_kwh,var_kwh2,n_obs\n";
  std::string line;
  for (const auto& [code, entries] : levels.by_category) {
    std::string name = format_code(code, scheme);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      line = name;
      line += ',';
      line += level_label(levels.fractions[i]);
      line += ',';
      if (entries[i].has_value()) {
        append_fixed(line, entries[i]->mean_kwh, 6);
        line += ',';
        append_fixed(line, entries[i]->variance_kwh2, 6);
        line += ',';
        line += std::to_string(entries[i]->n_obs);
      } else {
        line += ",,0";
      }
      out << line << '\n';
    }
  }
}

void write_annual_means_csv(std::ostream& out, const AnnualStatReport& report,
                            const CategoryScheme& scheme) {
  out << "category,avg_hourly_kwh,households\n";
  std::string line;
  for (const auto& [code, entry] : report.by_category) {
    line = format_code(code, scheme);
    line += ',';
    append_fixed(line, entry.avg_hourly_kwh, 6);
    line += ',';
    line += std::to_string(entry.households);
    out << line << '\n';
  }
}

void write_maxima_csv(std::ostream& out, const MaxReport& report,
                      const CategoryScheme& scheme) {
  out << "category,households,median_kwh,p98_kwh,p99_kwh\n";
  std::string line;
  for (const auto& [code, entry] : report.by_category) {
    line = format_code(code, scheme);
    line += ',';
    line += std::to_string(entry.households);
    line += ',';
    append_fixed(line, entry.median_kwh, 3);
    line += ',';
    append_fixed(line, entry.p98_kwh, 3);
    line += ',';
    append_fixed(line, entry.p99_kwh, 3);
    out << line << '\n';
  }
}

std::string max_report_json(const MaxReport& report,
                            const CategoryScheme& scheme) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [code, entry] : report.by_category) {
    nlohmann::ordered_json e;
    e["households"] = entry.households;
    e["median_kwh"] = entry.median_kwh;
    e["p98_kwh"] = entry.p98_kwh;
    e["p99_kwh"] = entry.p99_kwh;
    e["bin_width_kwh"] = kwh_from_milli(entry.bin_width_milli);
    e["histogram"] = entry.histogram;
    j[format_code(code, scheme)] = e;
  }
  return j.dump(2) + "\n";
}

}  // namespace loadlens
