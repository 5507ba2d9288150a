#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loadlens/calendar.hpp"
#include "loadlens/ingest.hpp"
#include "loadlens/taxonomy.hpp"

namespace loadlens {

/// Home charger archetype. Sessions draw `battery_kwh * U[0.5, 1)` of
/// energy as a contiguous block at rated power, final hour pro-rated.
struct ChargerClass {
  double power_kw = 11.0;
  double battery_kwh = 13.0;
  double weight = 1.0;  // class assignment weight across EV households
};

/// Electric heating add-on: flat within a day, winter-peaking across the
/// year, symmetric multiplicative noise (truncated at zero).
struct HeatModel {
  double base_kwh = 0.22;
  double winter_amplitude_kwh = 1.5;
  double noise_scale = 0.22;
};

/// Morning/evening double-hump base profile with weekend and seasonal
/// modulation and symmetric multiplicative noise.
struct BaseShape {
  double overnight_kwh = 0.09;
  double morning_peak_kwh = 0.22;
  double morning_hour = 7.0;
  double morning_width = 1.6;
  double evening_peak_kwh = 0.50;
  double evening_hour = 17.5;
  double evening_width = 2.2;
  double weekend_factor = 1.07;
  double winter_amplitude = 0.22;
  double noise_scale = 0.20;
};

struct EvModel {
  std::vector<ChargerClass> chargers = {
      {3.7, 8.0, 0.45}, {11.0, 13.0, 0.535}, {22.0, 26.0, 0.015}};
  double plugin_probability = 0.32;  // per day
  double holiday_dip = 0.45;         // multiplier inside the holiday window
  double start_hour_mean = 17.0;     // afternoon-weighted plugin start
  double start_hour_std = 2.5;
};

struct CategorySpec {
  CategoryCode code;
  int count = 0;
};

struct SynthConfig {
  int hours_in_year = kDefaultHoursInYear;
  std::uint64_t seed = 1;
  std::vector<CategorySpec> categories;
  BaseShape base;
  EvModel ev;
  HeatModel heat;
  double gap_probability = 0.0;  // chance an hour's reading is dropped
  int holiday_first_day = 181;   // 1 July, 0-based
  int holiday_last_day = 211;    // 31 July

  /// The six-category demo fleet (10,000 households) used by the bundled
  /// configuration.
  static SynthConfig defaults();
};

struct SynthFleet {
  std::vector<CleanProfile> profiles;
  std::vector<HouseholdAttributes> attributes;
  std::int64_t clipped_hours = 0;
};

/// Deterministic generation: household i draws from substream (seed, i), so
/// output is byte-identical for any worker count. All values fall in
/// (0, 29] kWh; clip events are counted.
SynthFleet generate_fleet(const SynthConfig& config,
                          const CategoryScheme& scheme, int workers = 1);

/// Qualitative signature checks of the calibrated fleet: evening skew for EV
/// categories, mean-vs-median tightness and winter/summer ratio for HP
/// categories, bimodality of EV per-household maxima.
struct CalibrationReport {
  struct EvSignature {
    std::string category;
    double evening_mean_kwh = 0.0;
    double evening_median_kwh = 0.0;
    double evening_third_moment = 0.0;
    std::vector<double> maxima_modes_kwh;  // local maxima of the histogram
  };
  struct HpSignature {
    std::string category;
    /// Worst clock hour of the profile day: |mean - median| / std.
    double max_gap_over_std = 0.0;
    double winter_summer_ratio = 0.0;
  };
  std::vector<EvSignature> ev;
  std::vector<HpSignature> hp;
  std::int64_t clipped_hours = 0;
};

CalibrationReport calibration_report(const SynthFleet& fleet,
                                     const CategoryScheme& scheme,
                                     int profile_day = 4);

std::string calibration_report_json(const CalibrationReport& report);

}  // namespace loadlens
