#include "escalife/time.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cstdio>

#include "escalife/error.hpp"

namespace escalife {

namespace {

using namespace std::chrono;

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view what) {
  if (pos + len > text.size()) {
    throw Error(std::string("malformed ") + std::string(what) + ": '" + std::string(text) + "'");
  }
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw Error(std::string("malformed ") + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view what) {
  if (pos >= text.size() || text[pos] != c) {
    throw Error(std::string("malformed ") + std::string(what) + ": '" + std::string(text) + "'");
  }
}

Date make_date(int y, int m, int d, std::string_view text) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) {
    throw Error("invalid date: '" + std::string(text) + "'");
  }
  return sys_days{ymd};
}

int floor_mod(long long a, int b) {
  const long long r = a % b;
  return static_cast<int>(r < 0 ? r + b : r);
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10) throw Error("malformed date: '" + std::string(text) + "'");
  const int y = read_int(text, 0, 4, "date");
  expect_char(text, 4, '-', "date");
  const int m = read_int(text, 5, 2, "date");
  expect_char(text, 7, '-', "date");
  const int d = read_int(text, 8, 2, "date");
  return make_date(y, m, d, text);
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  if (text.size() < 16) throw Error("malformed timestamp: '" + std::string(text) + "'");
  const Date d = parse_date(text.substr(0, 10));
  if (text[10] != 'T' && text[10] != ' ') {
    throw Error("malformed timestamp: '" + std::string(text) + "'");
  }
  const int hh = read_int(text, 11, 2, "timestamp");
  expect_char(text, 13, ':', "timestamp");
  const int mm = read_int(text, 14, 2, "timestamp");
  int ss = 0;
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    ss = read_int(text, 17, 2, "timestamp");
    pos = 19;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size() || hh > 23 || mm > 59 || ss > 59) {
    throw Error("malformed timestamp: '" + std::string(text) + "'");
  }
  return Timestamp{d} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp t) {
  const Date d = floor<days>(t);
  const hh_mm_ss<seconds> tod{t - d};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

ClockTime parse_clock(std::string_view text) {
  if (text.size() != 5) throw Error("malformed clock time: '" + std::string(text) + "'");
  const int hh = read_int(text, 0, 2, "clock time");
  expect_char(text, 2, ':', "clock time");
  const int mm = read_int(text, 3, 2, "clock time");
  if (mm > 59 || hh > 24 || (hh == 24 && mm != 0)) {
    throw Error("malformed clock time: '" + std::string(text) + "'");
  }
  return ClockTime{hh * 60 + mm};
}

std::string format_clock(ClockTime t) {
  return fmt::format("{:02d}:{:02d}", t.minutes / 60, t.minutes % 60);
}

int LocalClock::local_minute_of_day(Timestamp t) const {
  const auto local_min = floor<minutes>(t).time_since_epoch() + offset_;
  return floor_mod(local_min.count(), kMinutesPerDay);
}

Date LocalClock::local_date(Timestamp t) const {
  return floor<days>(t + offset_);
}

Date LocalClock::service_date(Timestamp t) const {
  return floor<days>(t + offset_ - minutes{kServiceDayStartMinute});
}

int LocalClock::service_slot(Timestamp t) const {
  const auto shifted = floor<minutes>(t).time_since_epoch() + offset_ - minutes{kServiceDayStartMinute};
  return floor_mod(shifted.count(), kMinutesPerDay);
}

Timestamp LocalClock::slot_time(Date service_date, int slot) const {
  return Timestamp{service_date} + minutes{kServiceDayStartMinute + slot} - offset_;
}

Timestamp LocalClock::service_clock_time(Date service_date, ClockTime t) const {
  return slot_time(service_date, clock_to_slot(t));
}

int clock_to_slot(ClockTime t) {
  return floor_mod(t.minutes - kServiceDayStartMinute, kMinutesPerDay);
}

double years_between(Date from, Date to) {
  return static_cast<double>((to - from).count()) / kDaysPerYear;
}

}  // namespace escalife
