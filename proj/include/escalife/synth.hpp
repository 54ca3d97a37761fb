#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/domain.hpp"
#include "escalife/energy.hpp"
#include "escalife/vibration.hpp"

namespace escalife::synth {

enum class InjectedKind { CorrectiveShutdown, PreventiveNight };

struct InjectedEvent {
  Date date{};  // service date
  int escalator_id = 0;
  InjectedKind kind = InjectedKind::CorrectiveShutdown;
  ClockTime start{12 * 60};
  int duration_min = 60;
};

/// Vibration level a * exp(b * age), in A_t units (g).
struct Degradation {
  double a = 0.0;
  double b = 0.0;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::vector<EscalatorMeta> fleet = default_fleet();
  Date start_date{};
  Date end_date{};  // inclusive
  int utc_offset_minutes = 8 * 60;
  Date age_reference = default_age_reference_date();
  /// Passenger arrivals per local hour at load scale 1.
  std::array<double, 24> daily_profile = default_daily_profile();
  std::map<int, double> load_scale;
  std::map<int, double> fixed_loss_wh_per_min;
  /// Exact daily passenger count, overriding the profile total.
  std::map<int, long> daily_passengers;
  std::map<int, Degradation> degradation;
  std::vector<InjectedEvent> injected_events;
  /// Bounded uniform noise, as a fraction of each reading.
  double noise_fraction = 0.02;
  /// Downward load per minute never exceeds this fraction of E_F.
  double down_load_cap = 0.6;
  /// Reading during an in-service shutdown.
  double standby_wh = 1.0;
  int spectrum_bins = 1280;
  std::vector<ClockTime> spectrum_times{ClockTime{2 * 60 + 30}, ClockTime{9 * 60}, ClockTime{14 * 60},
                                        ClockTime{19 * 60}};
  bool write_spectra = true;

  static std::array<double, 24> default_daily_profile();
};

void validate(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);

LocalClock clock_of(const SimConfig& cfg);
double fixed_loss_of(const SimConfig& cfg, const EscalatorMeta& meta);
Degradation degradation_of(const SimConfig& cfg, int escalator_id);

struct DayTruth {
  int escalator_id = 0;
  Date service_date{};
  double fixed_loss_wh_per_min = 0.0;
  long passengers = 0;
  /// Sum of per-minute passenger energy (the variable loss), Wh.
  double variable_loss_wh = 0.0;
  std::vector<energy::MaintenanceEvent> events;
};

nlohmann::json to_json(const DayTruth& t);

struct EnergyDay {
  std::vector<energy::EnergyMinute> minutes;
  DayTruth truth;
};

EnergyDay generate_energy_day(const SimConfig& cfg, int escalator_id, Date service_date);

vibration::SpectrumRecord generate_spectrum(const SimConfig& cfg, int escalator_id, int point_id, Timestamp t);

/// All points at every configured spectrum time of one service day.
std::vector<vibration::SpectrumRecord> generate_spectra_day(const SimConfig& cfg, int escalator_id, Date service_date);

struct CorpusSummary {
  std::size_t files = 0;
  std::size_t energy_rows = 0;
  std::size_t spectra = 0;
};

/// Writes fleet.json, site.json, energy/{id}/{date}.csv,
/// vibration/{id}/{date}.jsonl and truth/{id}/{date}.json under `out_dir`.
CorpusSummary write_raw_corpus(const SimConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace escalife::synth
