#pragma once

#include <array>
#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/time.hpp"

namespace escalife {

enum class Direction { Up, Down, BiDirectional };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Daily scheduled operating interval in local clock time. An end before the
/// start wraps past midnight; the window must not cross the 04:00 service-day
/// boundary.
struct ServiceWindow {
  ClockTime start{6 * 60};
  ClockTime end{1 * 60};

  int first_slot() const;
  /// One past the last slot, 1..1440.
  int end_slot() const;
  bool contains_slot(int slot) const { return slot >= first_slot() && slot < end_slot(); }
  int length_min() const { return end_slot() - first_slot(); }
};

struct EscalatorMeta {
  int id = 0;
  double rise_m = 0.0;
  Direction direction = Direction::Up;
  /// Service age at the fleet's age reference date.
  double age_years = 0.0;
  ServiceWindow service_window{};
};

void validate(const EscalatorMeta& meta);

/// Up and BiDirectional share the upward energy formulas.
inline bool runs_down(const EscalatorMeta& meta) { return meta.direction == Direction::Down; }

/// Age on `when`, given that `meta.age_years` holds at `reference`.
double age_at(const EscalatorMeta& meta, Date when, Date reference);

/// Date at which the bundled fleet ages hold.
Date default_age_reference_date();

/// The 24-escalator study fleet, ids 0-23.
std::vector<EscalatorMeta> default_fleet();

const EscalatorMeta& find_escalator(const std::vector<EscalatorMeta>& fleet, int id);

void to_json(nlohmann::json& j, const EscalatorMeta& meta);
void from_json(const nlohmann::json& j, EscalatorMeta& meta);

std::vector<EscalatorMeta> fleet_from_json(const nlohmann::json& j);
nlohmann::json fleet_to_json(const std::vector<EscalatorMeta>& fleet);

// Vibration sensors ----------------------------------------------------------

enum class SensorLocation {
  GearboxDE,
  GearboxNDE,
  MotorDE,
  MotorNDE,
  MainDriveDE,
  MainDriveNDE,
  TensionCarriageLeftDE,
  TensionCarriageRightNDE,
};

enum class FreqClass { HighFrequency, LowFrequency };

std::string_view to_string(SensorLocation loc);
std::string_view to_string(FreqClass c);
FreqClass parse_freq_class(std::string_view text);

inline constexpr int kSensorCount = 8;

struct SensorPoint {
  int point_id;
  SensorLocation location;
  FreqClass freq_class;
  /// Weight in hundredths; the eight defaults sum to exactly 100.
  int weight_hundredths;

  double weight() const { return weight_hundredths / 100.0; }
};

/// Points 1-8 in order.
const std::array<SensorPoint, kSensorCount>& sensor_layout();
const SensorPoint& sensor_point(int point_id);
std::array<double, kSensorCount> default_sensor_weights();

struct ThresholdRow {
  double alert_g;
  double alarm_g;
  double alert_mms;
  double alarm_mms;
};

class ThresholdTable {
 public:
  static ThresholdTable defaults();

  const ThresholdRow& at(SensorLocation loc) const { return rows_[static_cast<std::size_t>(loc)]; }
  void set(SensorLocation loc, const ThresholdRow& row);

 private:
  std::array<ThresholdRow, kSensorCount> rows_{};
};

// Quarters -------------------------------------------------------------------

struct Quarter {
  int year = 1970;
  int quarter = 1;

  auto operator<=>(const Quarter&) const = default;

  static Quarter of(Date d);
  /// Parses `2021Q4`.
  static Quarter parse(std::string_view text);

  Date first_day() const;
  /// First day of the following quarter.
  Date end_day() const;
  Quarter next() const;
  std::string to_string() const;
  bool contains(Date d) const { return d >= first_day() && d < end_day(); }
};

}  // namespace escalife
