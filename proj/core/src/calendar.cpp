#include "loadlens/calendar.hpp"

namespace loadlens {

namespace {
constexpr std::array<int, 12> kDaysPerMonth = {31, 28, 31, 30, 31, 30,
                                               31, 31, 30, 31, 30, 31};
}

MonthCalendar::MonthCalendar(int hours_in_year)
    : hours_in_year_(hours_in_year), leap_(hours_in_year >= kLeapHoursInYear) {
  int hour = 0;
  for (int m = 0; m < 12; ++m) {
    starts_[m] = hour;
    hour += days_in_month(m) * kHoursPerDay;
  }
  starts_[12] = hour;
}

int MonthCalendar::days_in_month(int month) const {
  if (month == 1 && leap_) return 29;
  return kDaysPerMonth[static_cast<std::size_t>(month)];
}

int MonthCalendar::month_of_hour(std::int64_t hour) const {
  if (hour < 0) return 0;
  if (hour >= starts_[12]) return 11;
  int lo = 0, hi = 12;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (hour >= starts_[mid]) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace loadlens
