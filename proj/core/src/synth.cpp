#include "loadlens/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "loadlens/bands.hpp"
#include "loadlens/errors.hpp"
#include "loadlens/parallel.hpp"
#include "loadlens/rng.hpp"
#include "loadlens/stats.hpp"

namespace loadlens {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Band-derived consumption multipliers. Monotone in occupancy and area band
// so expected annual energy orders the way the category grid does.
double category_scale(const CategoryCode& code) {
  static constexpr double kDwelling[] = {0.82, 1.18};  // Ap, H
  static constexpr double kOccupancy[] = {0.72, 1.0, 1.22, 1.42, 1.55, 1.66};
  static constexpr double kArea[] = {0.86, 1.0, 1.17, 1.28, 1.38};
  static constexpr double kIncome[] = {0.97, 1.0, 1.04, 1.06, 1.08};
  auto pick = [](const double* table, std::size_t n, int idx) {
    std::size_t i = static_cast<std::size_t>(idx);
    return table[std::min(i, n - 1)];
  };
  return pick(kDwelling, 2, static_cast<int>(code.dwelling)) *
         pick(kOccupancy, 6, code.occupancy_band) *
         pick(kArea, 5, code.area_band) * pick(kIncome, 5, code.income_band);
}

double clock_bump(double clock, double center, double width) {
  double d = std::fabs(clock - center);
  d = std::min(d, 24.0 - d);  // wrap around midnight
  return std::exp(-d * d / (2.0 * width * width));
}

// Season factor peaking in mid January, day taken modulo 365.
double season_factor(int day, double amplitude) {
  return 1.0 + amplitude * std::cos(kTwoPi * (day % 365 - 14) / 365.0);
}

struct BandRanges {
  double lo, hi;
};

BandRanges area_range(const CategoryScheme& scheme, const CategoryCode& code) {
  const auto& edges = code.dwelling == Dwelling::House
                          ? scheme.house_area_edges
                          : scheme.apartment_area_edges;
  const int band = code.area_band;
  if (edges.empty()) return {40.0, 160.0};
  if (band == 0) return {edges[0] * 0.45, edges[0]};
  if (band >= static_cast<int>(edges.size())) {
    return {edges.back() + 0.5, edges.back() * 1.6};
  }
  return {edges[static_cast<std::size_t>(band - 1)] + 0.5,
          edges[static_cast<std::size_t>(band)]};
}

BandRanges income_range(const CategoryScheme& scheme,
                        const CategoryCode& code) {
  const auto& edges = scheme.income_edges;
  const int band = code.income_band;
  if (edges.empty()) return {150000.0, 500000.0};
  if (band == 0) return {edges[0] * 0.5, edges[0]};
  if (band >= static_cast<int>(edges.size())) {
    return {edges.back() + 1.0, edges.back() * 1.7};
  }
  return {edges[static_cast<std::size_t>(band - 1)] + 1.0,
          edges[static_cast<std::size_t>(band)]};
}

int draw_occupants(Rng& rng, const CategoryScheme& scheme,
                   const CategoryCode& code) {
  const auto& uppers = scheme.occupancy_uppers;
  const int band = code.occupancy_band;
  int lo = band == 0 ? 1 : uppers[static_cast<std::size_t>(band - 1)] + 1;
  int hi = band < static_cast<int>(uppers.size())
               ? uppers[static_cast<std::size_t>(band)]
               : lo + 2;  // open band: lower .. lower+2
  return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

struct HouseholdPlan {
  const CategorySpec* spec;
  std::size_t global_index;
};

}  // namespace

SynthConfig SynthConfig::defaults() {
  SynthConfig config;
  config.seed = 1;
  CategoryScheme scheme;
  auto code = [&](const char* text) {
    auto parsed = parse_code(text, scheme);
    if (!parsed.has_value()) throw DomainError("bad default category code");
    return *parsed;
  };
  config.categories = {
      {code("H_P3_A1_€3_EV0_HP0"), 1200},
      {code("H_P3_A2_€3_EV0_HP0"), 1800},
      {code("H_P3_A3_€3_EV0_HP0"), 2800},
      {code("H_P3_A3_€3_EV1_HP0"), 1200},
      {code("H_P3_A2_€3_EV0_HP1"), 1000},
      {code("H_P3_A3_€3_EV0_HP1"), 2000},
  };
  return config;
}

SynthFleet generate_fleet(const SynthConfig& config,
                          const CategoryScheme& scheme, int workers) {
  if (config.hours_in_year < kHoursPerDay ||
      config.hours_in_year % kHoursPerDay != 0) {
    throw DomainError("generate_fleet: hours_in_year must be a positive multiple of 24");
  }
  for (const CategorySpec& spec : config.categories) {
    if (spec.count < 0) throw DomainError("generate_fleet: negative category count");
  }
  const int hours = config.hours_in_year;
  const int days = hours / kHoursPerDay;

  std::vector<HouseholdPlan> plan;
  std::size_t total = 0;
  for (const CategorySpec& spec : config.categories) {
    total += static_cast<std::size_t>(spec.count);
  }
  plan.reserve(total);
  {
    std::size_t index = 0;
    for (const CategorySpec& spec : config.categories) {
      for (int i = 0; i < spec.count; ++i) {
        plan.push_back(HouseholdPlan{&spec, index++});
      }
    }
  }

  int id_width = 1;
  for (std::size_t v = total; v >= 10; v /= 10) ++id_width;

  SynthFleet fleet;
  fleet.profiles.resize(total);
  fleet.attributes.resize(total);

  std::vector<std::int64_t> clipped(static_cast<std::size_t>(
      std::max(1, workers)));

  // Charger class assignment thresholds (cumulative weights).
  std::vector<double> charger_cum;
  {
    double sum = 0.0;
    for (const ChargerClass& c : config.ev.chargers) sum += c.weight;
    double acc = 0.0;
    for (const ChargerClass& c : config.ev.chargers) {
      acc += c.weight;
      charger_cum.push_back(sum > 0.0 ? acc / sum : 1.0);
    }
  }

  parallel_shards(total, workers, [&](std::size_t shard, std::size_t begin,
                                      std::size_t end) {
    std::vector<double> ev_add(static_cast<std::size_t>(hours));
    for (std::size_t i = begin; i < end; ++i) {
      const HouseholdPlan& hh = plan[i];
      const CategoryCode& code = hh.spec->code;
      Rng rng(config.seed, hh.global_index);

      // Attributes: drawn inside the band so categorization round-trips.
      HouseholdAttributes attrs;
      {
        char meter[32];
        std::snprintf(meter, sizeof(meter), "m%0*zu", id_width,
                      hh.global_index);
        attrs.meter_id = meter;
      }
      attrs.dwelling = code.dwelling;
      attrs.occupants = draw_occupants(rng, scheme, code);
      BandRanges ar = area_range(scheme, code);
      attrs.area_sqm = ar.lo + rng.uniform() * (ar.hi - ar.lo);
      BandRanges ir = income_range(scheme, code);
      attrs.income_dkk = ir.lo + rng.uniform() * (ir.hi - ir.lo);
      attrs.has_ev = code.ev;
      attrs.has_hp = code.hp;
      attrs.rural = rng.uniform() < 0.2;
      attrs.children = std::max(0, attrs.occupants - 2);

      const double scale = category_scale(code);

      // EV pre-pass: one optional charging block per day.
      std::fill(ev_add.begin(), ev_add.end(), 0.0);
      if (code.ev && !config.ev.chargers.empty()) {
        double pick = rng.uniform();
        std::size_t cls = 0;
        while (cls + 1 < charger_cum.size() && pick >= charger_cum[cls]) ++cls;
        const ChargerClass& charger = config.ev.chargers[cls];
        for (int day = 0; day < days; ++day) {
          const bool holiday = day >= config.holiday_first_day &&
                               day <= config.holiday_last_day;
          double p = config.ev.plugin_probability *
                     (holiday ? config.ev.holiday_dip : 1.0);
          if (rng.uniform() >= p) continue;
          double start = config.ev.start_hour_mean +
                         config.ev.start_hour_std * rng.normal();
          int start_clock =
              std::clamp(static_cast<int>(std::lround(start)), 0, 23);
          double energy =
              charger.battery_kwh * (0.5 + 0.5 * rng.uniform());
          int t = day * kHoursPerDay + start_clock;
          while (energy > 0.0 && t < hours) {
            double draw = std::min(charger.power_kw, energy);
            ev_add[static_cast<std::size_t>(t)] += draw;
            energy -= draw;
            ++t;
          }
        }
      }

      // Hour loop: base + heat + charging, clipped into (0, 29].
      std::vector<std::int32_t> slots(static_cast<std::size_t>(hours),
                                      CleanProfile::kAbsent);
      std::int64_t clips = 0;
      for (int day = 0; day < days; ++day) {
        const int dow = day % 7;  // day 0 is a Sunday
        const bool weekend = dow == 0 || dow == 6;
        const double season = season_factor(day, config.base.winter_amplitude);
        const double day_factor =
            scale * season * (weekend ? config.base.weekend_factor : 1.0);
        const double heat_level =
            code.hp ? config.heat.base_kwh +
                          config.heat.winter_amplitude_kwh *
                              0.5 * (1.0 + std::cos(kTwoPi * (day % 365 - 14) / 365.0))
                    : 0.0;
        for (int clock = 0; clock < kHoursPerDay; ++clock) {
          const int t = day * kHoursPerDay + clock;
          double base =
              config.base.overnight_kwh +
              config.base.morning_peak_kwh *
                  clock_bump(clock, config.base.morning_hour,
                             config.base.morning_width) +
              config.base.evening_peak_kwh *
                  clock_bump(clock, config.base.evening_hour,
                             config.base.evening_width);
          base *= day_factor;
          base *= std::max(0.05, 1.0 + config.base.noise_scale * rng.normal());

          double value = base + ev_add[static_cast<std::size_t>(t)];
          if (code.hp) {
            value += heat_level *
                     std::max(0.0, 1.0 + config.heat.noise_scale * rng.normal());
          }

          if (config.gap_probability > 0.0 &&
              rng.uniform() < config.gap_probability) {
            continue;  // reading dropped; slot stays absent
          }

          std::int64_t milli = std::llround(value * 1000.0);
          if (milli > kValueCapMilli) {
            milli = kValueCapMilli;
            ++clips;
          } else if (milli < 1) {
            milli = 1;
            ++clips;
          }
          slots[static_cast<std::size_t>(t)] = static_cast<std::int32_t>(milli);
        }
      }

      ProfileOutcome outcome =
          assemble_from_values(attrs.meter_id, slots);
      if (!outcome.accepted()) {
        // Only possible under extreme gap_probability; keep the profile slot
        // empty-valued so indices stay aligned.
        CleanProfile empty;
        empty.meter_id = attrs.meter_id;
        empty.values_milli.assign(static_cast<std::size_t>(hours),
                                  CleanProfile::kAbsent);
        empty.gap_count = hours;
        fleet.profiles[i] = std::move(empty);
      } else {
        fleet.profiles[i] = std::move(std::get<CleanProfile>(outcome.result));
      }
      fleet.attributes[i] = std::move(attrs);
      clipped[shard] += clips;
    }
  });

  for (std::int64_t c : clipped) fleet.clipped_hours += c;
  return fleet;
}

namespace {

std::vector<double> histogram_modes(const std::vector<std::int64_t>& hist,
                                    double bin_width_kwh) {
  // Local maxima above a tenth of the global peak, at least two bins apart.
  std::vector<double> modes;
  std::int64_t peak = 0;
  for (std::int64_t c : hist) peak = std::max(peak, c);
  if (peak == 0) return modes;
  std::int64_t floor = std::max<std::int64_t>(1, peak / 10);
  int last_mode_bin = -10;
  for (std::size_t b = 0; b < hist.size(); ++b) {
    std::int64_t c = hist[b];
    if (c < floor) continue;
    std::int64_t left = b > 0 ? hist[b - 1] : 0;
    std::int64_t right = b + 1 < hist.size() ? hist[b + 1] : 0;
    if (c >= left && c > right) {
      if (static_cast<int>(b) - last_mode_bin >= 2) {
        modes.push_back((static_cast<double>(b) + 0.5) * bin_width_kwh);
        last_mode_bin = static_cast<int>(b);
      }
    }
  }
  return modes;
}

}  // namespace

CalibrationReport calibration_report(const SynthFleet& fleet,
                                     const CategoryScheme& scheme,
                                     int profile_day) {
  CalibrationReport report;
  report.clipped_hours = fleet.clipped_hours;

  CategoryTable table = build_category_table(fleet.attributes, scheme);
  CategoryGroups groups = group_profiles(table, fleet.profiles);
  MaxReport maxima = household_maxima(groups);

  for (const auto& [code, group] : groups) {
    if (group.empty()) continue;
    const int hours = group.front()->hours_in_year();
    if (code.ev) {
      CalibrationReport::EvSignature sig;
      sig.category = format_code(code, scheme);

      // Pooled evening (17-19) observations across the year.
      std::vector<double> evening;
      for (const CleanProfile* p : group) {
        for (int h = 0; h < hours; ++h) {
          int clock = h % kHoursPerDay;
          if (clock < 17 || clock > 19) continue;
          std::int32_t v = p->values_milli[static_cast<std::size_t>(h)];
          if (v >= 0) evening.push_back(kwh_from_milli(v));
        }
      }
      if (evening.size() >= 3) {
        SkewDiagnostic diag = skewness_diagnostic(evening);
        double sum = 0.0;
        for (double v : evening) sum += v;
        sig.evening_mean_kwh = sum / static_cast<double>(evening.size());
        sig.evening_median_kwh = sig.evening_mean_kwh - diag.mean_median_gap;
        sig.evening_third_moment = diag.third_moment.value_or(0.0);
      }
      auto it = maxima.by_category.find(code);
      if (it != maxima.by_category.end()) {
        sig.maxima_modes_kwh = histogram_modes(
            it->second.histogram, kwh_from_milli(it->second.bin_width_milli));
      }
      report.ev.push_back(std::move(sig));
    }
    if (code.hp) {
      CalibrationReport::HpSignature sig;
      sig.category = format_code(code, scheme);

      DayBandProfile bands = day_bands(code, group, profile_day);
      double worst = 0.0;
      for (const auto& band : bands.hours) {
        if (!band.has_value() || band->std_kwh <= 0.0) continue;
        worst = std::max(worst, std::fabs(band->mean_kwh - band->median_kwh) /
                                    band->std_kwh);
      }
      sig.max_gap_over_std = worst;

      MonthCalendar months(hours);
      StreamAccumulator january, july;
      for (const CleanProfile* p : group) {
        for (int h = 0; h < hours; ++h) {
          std::int32_t v = p->values_milli[static_cast<std::size_t>(h)];
          if (v < 0) continue;
          int month = months.month_of_hour(h);
          if (month == 0) january.add(v);
          if (month == 6) july.add(v);
        }
      }
      if (july.count > 0 && july.mean_kwh() > 0.0) {
        sig.winter_summer_ratio = january.mean_kwh() / july.mean_kwh();
      }
      report.hp.push_back(std::move(sig));
    }
  }
  return report;
}

std::string calibration_report_json(const CalibrationReport& report) {
  nlohmann::ordered_json j;
  j["clipped_hours"] = report.clipped_hours;
  nlohmann::ordered_json ev = nlohmann::ordered_json::array();
  for (const auto& sig : report.ev) {
    nlohmann::ordered_json e;
    e["category"] = sig.category;
    e["evening_mean_kwh"] = sig.evening_mean_kwh;
    e["evening_median_kwh"] = sig.evening_median_kwh;
    e["evening_third_moment"] = sig.evening_third_moment;
    e["maxima_modes_kwh"] = sig.maxima_modes_kwh;
    ev.push_back(e);
  }
  j["ev"] = ev;
  nlohmann::ordered_json hp = nlohmann::ordered_json::array();
  for (const auto& sig : report.hp) {
    nlohmann::ordered_json e;
    e["category"] = sig.category;
    e["max_gap_over_std"] = sig.max_gap_over_std;
    e["winter_summer_ratio"] = sig.winter_summer_ratio;
    hp.push_back(e);
  }
  j["hp"] = hp;
  return j.dump(2) + "\n";
}

}  // namespace loadlens
