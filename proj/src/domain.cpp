#include "escalife/domain.hpp"

#include <algorithm>
#include <charconv>

#include "escalife/error.hpp"

namespace escalife {

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Up: return "Up";
    case Direction::Down: return "Down";
    case Direction::BiDirectional: return "BiDirectional";
  }
  return "?";
}

Direction parse_direction(std::string_view text) {
  if (text == "Up") return Direction::Up;
  if (text == "Down") return Direction::Down;
  if (text == "BiDirectional") return Direction::BiDirectional;
  throw Error("unknown direction '" + std::string(text) + "'");
}

int ServiceWindow::first_slot() const { return clock_to_slot(start); }

int ServiceWindow::end_slot() const {
  const int s = clock_to_slot(end);
  return s == 0 ? kMinutesPerDay : s;
}

void validate(const EscalatorMeta& meta) {
  if (!(meta.rise_m > 0.0)) {
    throw Error("escalator " + std::to_string(meta.id) + ": rise_m must be > 0");
  }
  if (!(meta.age_years >= 0.0)) {
    throw Error("escalator " + std::to_string(meta.id) + ": age_years must be >= 0");
  }
  if (meta.service_window.end_slot() <= meta.service_window.first_slot()) {
    throw Error("escalator " + std::to_string(meta.id) +
                ": service window must not cross the 04:00 service-day boundary");
  }
}

double age_at(const EscalatorMeta& meta, Date when, Date reference) {
  return meta.age_years + years_between(reference, when);
}

Date default_age_reference_date() { return parse_date("2022-08-26"); }

std::vector<EscalatorMeta> default_fleet() {
  using enum Direction;
  struct Row {
    double rise;
    Direction dir;
    double age;
  };
  static constexpr std::array<Row, 24> rows{{
      {16.72, Up, 7.0},     {16.72, Up, 7.0},     {5.5, Up, 24.2},     {5.5, Down, 24.2},
      {8.926, Down, 18.7},  {8.926, Down, 18.7},  {5.6, Down, 13.1},   {5.6, Up, 13.1},
      {8.28, Down, 18.7},   {8.28, Down, 18.7},   {5.88, Down, 18.7},  {5.88, Up, 18.7},
      {3.567, Up, 18.7},    {3.567, Down, 18.7},  {6.79, Up, 18.7},    {6.79, Down, 18.7},
      {5.35, BiDirectional, 17.7}, {5.35, BiDirectional, 17.7}, {8.175, Up, 18.7}, {8.175, Down, 18.7},
      {6.02, Down, 18.7},   {6.02, Up, 18.7},     {7.635, Up, 18.7},   {7.635, Down, 18.7},
  }};
  std::vector<EscalatorMeta> fleet;
  fleet.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    fleet.push_back(EscalatorMeta{static_cast<int>(i), rows[i].rise, rows[i].dir, rows[i].age, ServiceWindow{}});
  }
  return fleet;
}

const EscalatorMeta& find_escalator(const std::vector<EscalatorMeta>& fleet, int id) {
  auto it = std::find_if(fleet.begin(), fleet.end(), [id](const EscalatorMeta& m) { return m.id == id; });
  if (it == fleet.end()) throw Error("unknown escalator id " + std::to_string(id));
  return *it;
}

void to_json(nlohmann::json& j, const EscalatorMeta& meta) {
  j = nlohmann::json{
      {"id", meta.id},
      {"rise_m", meta.rise_m},
      {"direction", to_string(meta.direction)},
      {"age_years", meta.age_years},
      {"service_window",
       {{"start", format_clock(meta.service_window.start)}, {"end", format_clock(meta.service_window.end)}}},
  };
}

void from_json(const nlohmann::json& j, EscalatorMeta& meta) {
  try {
    meta.id = j.at("id").get<int>();
    meta.rise_m = j.at("rise_m").get<double>();
    meta.direction = parse_direction(j.at("direction").get<std::string>());
    meta.age_years = j.at("age_years").get<double>();
    if (j.contains("service_window")) {
      const auto& w = j.at("service_window");
      meta.service_window.start = parse_clock(w.at("start").get<std::string>());
      meta.service_window.end = parse_clock(w.at("end").get<std::string>());
    } else {
      meta.service_window = ServiceWindow{};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid escalator metadata: ") + e.what());
  }
  validate(meta);
}

std::vector<EscalatorMeta> fleet_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("fleet metadata must be a JSON array");
  std::vector<EscalatorMeta> fleet;
  for (const auto& item : j) {
    EscalatorMeta m;
    from_json(item, m);
    if (std::any_of(fleet.begin(), fleet.end(), [&](const EscalatorMeta& o) { return o.id == m.id; })) {
      throw Error("duplicate escalator id " + std::to_string(m.id));
    }
    fleet.push_back(m);
  }
  return fleet;
}

nlohmann::json fleet_to_json(const std::vector<EscalatorMeta>& fleet) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& m : fleet) j.push_back(m);
  return j;
}

std::string_view to_string(SensorLocation loc) {
  switch (loc) {
    case SensorLocation::GearboxDE: return "GearboxDE";
    case SensorLocation::GearboxNDE: return "GearboxNDE";
    case SensorLocation::MotorDE: return "MotorDE";
    case SensorLocation::MotorNDE: return "MotorNDE";
    case SensorLocation::MainDriveDE: return "MainDriveDE";
    case SensorLocation::MainDriveNDE: return "MainDriveNDE";
    case SensorLocation::TensionCarriageLeftDE: return "TensionCarriageLeftDE";
    case SensorLocation::TensionCarriageRightNDE: return "TensionCarriageRightNDE";
  }
  return "?";
}

std::string_view to_string(FreqClass c) {
  return c == FreqClass::HighFrequency ? "HighFrequency" : "LowFrequency";
}

FreqClass parse_freq_class(std::string_view text) {
  if (text == "HighFrequency") return FreqClass::HighFrequency;
  if (text == "LowFrequency") return FreqClass::LowFrequency;
  throw Error("unknown frequency class '" + std::string(text) + "'");
}

const std::array<SensorPoint, kSensorCount>& sensor_layout() {
  using enum SensorLocation;
  using enum FreqClass;
  static const std::array<SensorPoint, kSensorCount> layout{{
      {1, GearboxDE, HighFrequency, 11},
      {2, GearboxNDE, HighFrequency, 11},
      {3, MotorDE, HighFrequency, 11},
      {4, MotorNDE, HighFrequency, 11},
      {5, MainDriveDE, LowFrequency, 17},
      {6, MainDriveNDE, LowFrequency, 16},
      {7, TensionCarriageLeftDE, LowFrequency, 12},
      {8, TensionCarriageRightNDE, LowFrequency, 11},
  }};
  return layout;
}

const SensorPoint& sensor_point(int point_id) {
  if (point_id < 1 || point_id > kSensorCount) {
    throw Error("sensor point " + std::to_string(point_id) + " out of range 1..8");
  }
  return sensor_layout()[static_cast<std::size_t>(point_id - 1)];
}

std::array<double, kSensorCount> default_sensor_weights() {
  std::array<double, kSensorCount> w{};
  for (const auto& p : sensor_layout()) w[static_cast<std::size_t>(p.point_id - 1)] = p.weight();
  return w;
}

ThresholdTable ThresholdTable::defaults() {
  ThresholdTable t;
  const ThresholdRow fast{0.375, 0.75, 2.8, 4.5};
  const ThresholdRow slow{0.15, 0.3, 2.8, 4.5};
  for (const auto& p : sensor_layout()) {
    t.rows_[static_cast<std::size_t>(p.location)] = p.freq_class == FreqClass::HighFrequency ? fast : slow;
  }
  return t;
}

void ThresholdTable::set(SensorLocation loc, const ThresholdRow& row) {
  if (!(row.alert_g < row.alarm_g) || !(row.alert_mms < row.alarm_mms)) {
    throw Error("threshold alert level must be below alarm level");
  }
  rows_[static_cast<std::size_t>(loc)] = row;
}

Quarter Quarter::of(Date d) {
  const std::chrono::year_month_day ymd{d};
  return Quarter{static_cast<int>(ymd.year()), static_cast<int>((static_cast<unsigned>(ymd.month()) - 1) / 3 + 1)};
}

Quarter Quarter::parse(std::string_view text) {
  int y = 0;
  int q = 0;
  if (text.size() == 6 && (text[4] == 'Q' || text[4] == 'q')) {
    auto r1 = std::from_chars(text.data(), text.data() + 4, y);
    auto r2 = std::from_chars(text.data() + 5, text.data() + 6, q);
    if (r1.ec == std::errc{} && r2.ec == std::errc{} && q >= 1 && q <= 4) return Quarter{y, q};
  }
  throw Error("malformed quarter '" + std::string(text) + "' (expected YYYYQN)");
}

Date Quarter::first_day() const {
  namespace chr = std::chrono;
  return chr::sys_days{chr::year{year} / chr::month{static_cast<unsigned>((quarter - 1) * 3 + 1)} / chr::day{1}};
}

Date Quarter::end_day() const { return next().first_day(); }

Quarter Quarter::next() const { return quarter == 4 ? Quarter{year + 1, 1} : Quarter{year, quarter + 1}; }

std::string Quarter::to_string() const { return std::to_string(year) + "Q" + std::to_string(quarter); }

}  // namespace escalife
