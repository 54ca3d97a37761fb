#include "escalife/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace escalife::io {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  while (!s.empty() && ws.find(s.front()) != std::string_view::npos) s.remove_prefix(1);
  while (!s.empty() && ws.find(s.back()) != std::string_view::npos) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field) {
  field = trim(field);
  if (field == "nan" || field == "NaN") return std::nan("");
  double v = 0.0;
  const char* first = field.data();
  if (!field.empty() && field.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error("not a number: '" + std::string(field) + "'");
  }
  return v;
}

long parse_long(std::string_view field) {
  field = trim(field);
  long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error("not an integer: '" + std::string(field) + "'");
  }
  return v;
}

int parse_int(std::string_view field) { return static_cast<int>(parse_long(field)); }

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

std::string fixed(double v, int decimals) {
  if (std::isnan(v)) return "nan";
  std::string s = fmt::format("{:.{}f}", v, decimals);
  // Avoid "-0.0000".
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& p, std::string_view content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::filesystem::path tmp = p;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

std::vector<std::string_view> lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t pos = content.find('\n', start);
    if (pos == std::string_view::npos) pos = content.size();
    std::string_view l = content.substr(start, pos - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out.push_back(l);
    start = pos + 1;
  }
  return out;
}

namespace {

std::string num(double v, int decimals) { return decimals < 0 ? shortest(v) : fixed(v, decimals); }

}  // namespace

std::string format_energy_row(const energy::EnergyMinute& m, bool with_electrical, int decimals) {
  std::string s = fmt::format("{},{},{},{}", m.escalator_id, format_timestamp(m.timestamp), num(m.e_imp_wh, decimals),
                              num(m.e_exp_wh, decimals));
  if (with_electrical) {
    s += ',';
    if (m.current_a) s += shortest(*m.current_a);
    s += ',';
    if (m.voltage_v) s += shortest(*m.voltage_v);
  }
  return s;
}

energy::EnergyMinute parse_energy_row(std::string_view line) {
  const auto f = split(line);
  if (f.size() != 4 && f.size() != 6) {
    throw Error("energy row has " + std::to_string(f.size()) + " fields, expected 4 or 6");
  }
  energy::EnergyMinute m;
  m.escalator_id = parse_int(f[0]);
  m.timestamp = parse_timestamp(trim(f[1]));
  m.e_imp_wh = parse_double(f[2]);
  m.e_exp_wh = parse_double(f[3]);
  if (f.size() == 6) {
    if (!trim(f[4]).empty()) m.current_a = parse_double(f[4]);
    if (!trim(f[5]).empty()) m.voltage_v = parse_double(f[5]);
  }
  return m;
}

std::string format_spectrum_jsonl(const vibration::SpectrumRecord& s, int significant_digits) {
  std::string out = fmt::format(R"({{"escalator_id":{},"point_id":{},"timestamp_utc":"{}","bin_hz":{},"magnitudes":[)",
                                s.escalator_id, s.point_id, format_timestamp(s.timestamp), shortest(s.bin_hz));
  out.reserve(out.size() + s.magnitudes.size() * 10);
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i) {
    if (i) out += ',';
    if (significant_digits > 0) {
      out += fmt::format("{:.{}g}", s.magnitudes[i], significant_digits);
    } else {
      out += shortest(s.magnitudes[i]);
    }
  }
  out += "]}";
  return out;
}

vibration::SpectrumRecord parse_spectrum_jsonl(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    vibration::SpectrumRecord s;
    s.escalator_id = j.at("escalator_id").get<int>();
    s.point_id = j.at("point_id").get<int>();
    s.timestamp = parse_timestamp(j.at("timestamp_utc").get<std::string>());
    s.bin_hz = j.at("bin_hz").get<double>();
    s.magnitudes = j.at("magnitudes").get<std::vector<double>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid spectrum record: ") + e.what());
  }
}

std::string format_daily_row(const energy::DailyFeatures& d) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", d.escalator_id, format_date(d.service_date), d.working_min,
                     shortest(d.fixed_loss_wh_min), shortest(d.variable_loss_wh), shortest(d.passengers),
                     d.corrective_events, d.preventive_events, d.missing_window_min);
}

energy::DailyFeatures parse_daily_row(std::string_view line) {
  const auto f = split(line);
  if (f.size() != 9) throw Error("daily features row has " + std::to_string(f.size()) + " fields, expected 9");
  energy::DailyFeatures d;
  d.escalator_id = parse_int(f[0]);
  d.service_date = parse_date(trim(f[1]));
  d.working_min = parse_int(f[2]);
  d.fixed_loss_wh_min = parse_double(f[3]);
  d.variable_loss_wh = parse_double(f[4]);
  d.passengers = parse_double(f[5]);
  d.corrective_events = parse_int(f[6]);
  d.preventive_events = parse_int(f[7]);
  d.missing_window_min = parse_int(f[8]);
  return d;
}

std::string format_at_row(const vibration::AtRecord& r) {
  return fmt::format("{},{},{},{},{}", r.escalator_id, r.point_id, format_timestamp(r.timestamp), shortest(r.at_g),
                     vibration::to_string(r.status));
}

vibration::AtRecord parse_at_row(std::string_view line) {
  const auto f = split(line);
  if (f.size() != 5) throw Error("A_t row has " + std::to_string(f.size()) + " fields, expected 5");
  vibration::AtRecord r;
  r.escalator_id = parse_int(f[0]);
  r.point_id = parse_int(f[1]);
  r.timestamp = parse_timestamp(trim(f[2]));
  r.at_g = parse_double(f[3]);
  r.status = vibration::parse_at_status(trim(f[4]));
  return r;
}

std::string format_quarter_row(const health::QuarterFeatures& q) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", q.escalator_id, q.quarter.year, q.quarter.quarter,
                     shortest(q.age_years), shortest(q.raw.working_time), shortest(q.raw.passenger_load),
                     shortest(q.raw.fixed_loss_residual), shortest(q.raw.exceedance_area), shortest(q.raw.fault_count),
                     shortest(q.normalized.working_time), shortest(q.normalized.passenger_load),
                     shortest(q.normalized.exceedance_area), shortest(q.normalized.fixed_loss_residual),
                     shortest(q.normalized.fault_count), shortest(q.lhi));
}

health::QuarterFeatures parse_quarter_row(std::string_view line) {
  const auto f = split(line);
  if (f.size() != 15) throw Error("quarter row has " + std::to_string(f.size()) + " fields, expected 15");
  health::QuarterFeatures q;
  q.escalator_id = parse_int(f[0]);
  q.quarter = Quarter{parse_int(f[1]), parse_int(f[2])};
  if (q.quarter.quarter < 1 || q.quarter.quarter > 4) throw Error("quarter must be 1..4");
  q.age_years = parse_double(f[3]);
  q.raw.working_time = parse_double(f[4]);
  q.raw.passenger_load = parse_double(f[5]);
  q.raw.fixed_loss_residual = parse_double(f[6]);
  q.raw.exceedance_area = parse_double(f[7]);
  q.raw.fault_count = parse_double(f[8]);
  q.normalized.working_time = parse_double(f[9]);
  q.normalized.passenger_load = parse_double(f[10]);
  q.normalized.exceedance_area = parse_double(f[11]);
  q.normalized.fixed_loss_residual = parse_double(f[12]);
  q.normalized.fault_count = parse_double(f[13]);
  q.lhi = parse_double(f[14]);
  return q;
}

std::string format_rul_row(const RulRow& r) {
  const auto& q = r.features;
  const auto d = kRulDecimals;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", q.escalator_id, q.quarter.year, q.quarter.quarter,
                     fixed(r.result.actual_age, d), fixed(r.t_end_years - r.result.actual_age, d),
                     fixed(r.result.rul_years, d), fixed(r.result.lhi_used, d), fixed(q.normalized.working_time, d),
                     fixed(q.normalized.passenger_load, d), fixed(q.normalized.exceedance_area, d),
                     fixed(q.normalized.fixed_loss_residual, d), fixed(q.normalized.fault_count, d));
}

}  // namespace escalife::io
