#pragma once

#include <array>
#include <cstdint>

namespace loadlens {

inline constexpr int kDefaultHoursInYear = 8760;
inline constexpr int kLeapHoursInYear = 8784;
inline constexpr int kHoursPerDay = 24;

/// Civil-calendar month boundaries over an hour-of-year axis starting
/// January 1, hour 0. A year of 8784 hours is treated as a leap year.
/// Hour indices past the final boundary clamp into December so short or
/// synthetic axes stay well-defined.
class MonthCalendar {
 public:
  explicit MonthCalendar(int hours_in_year = kDefaultHoursInYear);

  int hours_in_year() const { return hours_in_year_; }
  bool leap() const { return leap_; }

  /// Month index in [0, 11] for an hour-of-year.
  int month_of_hour(std::int64_t hour) const;

  /// First hour of each month plus a trailing sentinel (13 entries).
  const std::array<int, 13>& month_start_hours() const { return starts_; }

  int days_in_month(int month) const;

 private:
  int hours_in_year_;
  bool leap_;
  std::array<int, 13> starts_;
};

}  // namespace loadlens
