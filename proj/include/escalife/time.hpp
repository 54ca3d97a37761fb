#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace escalife {

using Date = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

inline constexpr int kMinutesPerDay = 1440;
/// Service days run 04:00 -> 04:00 local time.
inline constexpr int kServiceDayStartMinute = 4 * 60;
inline constexpr double kDaysPerYear = 365.25;

/// Parses `YYYY-MM-DD`.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Parses `YYYY-MM-DDTHH:MM:SSZ` (the `Z` and the seconds are optional, a
/// space may replace the `T`).
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Local wall-clock time of day, minutes after midnight.
struct ClockTime {
  int minutes = 0;
  auto operator<=>(const ClockTime&) const = default;
};

/// Parses `HH:MM`; `24:00` is accepted as end-of-day.
ClockTime parse_clock(std::string_view text);
std::string format_clock(ClockTime t);

/// Converts between UTC timestamps and the local clock used for service
/// days and service windows.
class LocalClock {
 public:
  LocalClock() = default;
  explicit LocalClock(std::chrono::minutes utc_offset) : offset_(utc_offset) {}

  std::chrono::minutes utc_offset() const { return offset_; }

  /// Minute of the local calendar day, 0..1439.
  int local_minute_of_day(Timestamp t) const;
  Date local_date(Timestamp t) const;

  Date service_date(Timestamp t) const;
  /// Minutes since 04:00 local on the service date, 0..1439.
  int service_slot(Timestamp t) const;
  Timestamp slot_time(Date service_date, int slot) const;

  /// UTC instant of a local clock time, where times before 04:00 belong to
  /// the following calendar day.
  Timestamp service_clock_time(Date service_date, ClockTime t) const;

 private:
  std::chrono::minutes offset_{8 * 60};
};

/// Converts a local clock time to a slot index within the service day.
int clock_to_slot(ClockTime t);

double years_between(Date from, Date to);

}  // namespace escalife
