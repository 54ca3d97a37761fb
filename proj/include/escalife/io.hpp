#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "escalife/energy.hpp"
#include "escalife/error.hpp"
#include "escalife/health.hpp"
#include "escalife/rul.hpp"
#include "escalife/vibration.hpp"

namespace escalife::io {

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

double parse_double(std::string_view field);
long parse_long(std::string_view field);
int parse_int(std::string_view field);

/// Shortest round-trip representation; `nan` for NaN.
std::string shortest(double v);
std::string fixed(double v, int decimals);

std::string read_file(const std::filesystem::path& p);
/// Writes to a sibling temp file, then renames over `p`.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

/// Splits file content into lines, dropping a trailing empty line and '\r'.
std::vector<std::string_view> lines(std::string_view content);

// Raw energy ---------------------------------------------------------------

inline constexpr std::string_view kEnergyHeader = "escalator_id,timestamp_utc,e_imp_wh,e_exp_wh";
inline constexpr std::string_view kEnergyHeaderFull = "escalator_id,timestamp_utc,e_imp_wh,e_exp_wh,current_a,voltage_v";

/// `decimals < 0` means shortest representation.
std::string format_energy_row(const energy::EnergyMinute& m, bool with_electrical, int decimals = -1);
/// Accepts 4 or 6 fields (current/voltage may be empty).
energy::EnergyMinute parse_energy_row(std::string_view line);

// Spectra ------------------------------------------------------------------

/// `significant_digits <= 0` means shortest representation.
std::string format_spectrum_jsonl(const vibration::SpectrumRecord& s, int significant_digits = 0);
vibration::SpectrumRecord parse_spectrum_jsonl(std::string_view line);

// Derived tables -----------------------------------------------------------

inline constexpr std::string_view kDailyHeader =
    "escalator_id,service_date,working_min,fixed_loss_wh_min,variable_loss_wh,passengers,corrective_events,"
    "preventive_events,missing_window_min";
std::string format_daily_row(const energy::DailyFeatures& d);
energy::DailyFeatures parse_daily_row(std::string_view line);

inline constexpr std::string_view kAtHeader = "escalator_id,point_id,timestamp_utc,at_g,status";
std::string format_at_row(const vibration::AtRecord& r);
vibration::AtRecord parse_at_row(std::string_view line);

inline constexpr std::string_view kQuarterHeader =
    "escalator_id,year,quarter,actual_age,working_time_min,passenger_count,fixed_loss_residual_wh_min,"
    "at_area_weighted,fault_count,working_hours,passenger_load,at_areas,fixed_loss_residual,fault_counts,lhi";
std::string format_quarter_row(const health::QuarterFeatures& q);
health::QuarterFeatures parse_quarter_row(std::string_view line);

inline constexpr std::string_view kRulHeader =
    "escalator_id,year,quarter,actual_age,years_till_35,rul,lhi,working_hours,passenger_load,at_areas,"
    "fixed_loss_residual,fault_counts";
inline constexpr int kRulDecimals = 4;

struct RulRow {
  health::QuarterFeatures features;
  rul::RulResult result;
  double t_end_years = health::kDefaultEndOfLifeYears;
};

std::string format_rul_row(const RulRow& r);

/// Parses a whole CSV file with the expected header; throws on mismatch.
template <typename Row, typename Parse>
std::vector<Row> parse_table(std::string_view content, std::string_view header, Parse parse) {
  std::vector<Row> rows;
  auto ls = lines(content);
  if (ls.empty()) return rows;
  if (trim(ls.front()) != header) {
    throw Error("unexpected CSV header '" + std::string(ls.front()) + "'");
  }
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (trim(ls[i]).empty()) continue;
    rows.push_back(parse(ls[i]));
  }
  return rows;
}

}  // namespace escalife::io
