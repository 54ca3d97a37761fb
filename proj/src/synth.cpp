#include "escalife/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "escalife/error.hpp"
#include "escalife/io.hpp"

namespace escalife::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, purpose, keys...), so any single day or
// spectrum can be regenerated without replaying the others.
class Rng {
 public:
  template <typename... Keys>
  explicit Rng(std::uint64_t seed, Keys... keys) : engine_(mix(seed, static_cast<std::uint64_t>(keys)...)) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  template <typename... Keys>
  static std::uint64_t mix(std::uint64_t h, Keys... keys) {
    h = splitmix64(h);
    ((h = splitmix64(h ^ keys)), ...);
    return h;
  }

  std::mt19937_64 engine_;
};

enum Purpose : std::uint64_t { kEnergy = 1, kSpectrum = 2, kPointGain = 3, kDefaults = 4 };

std::uint64_t day_key(Date d) { return static_cast<std::uint64_t>(d.time_since_epoch().count() + (1LL << 40)); }

const EscalatorMeta& meta_of(const SimConfig& cfg, int id) { return find_escalator(cfg.fleet, id); }

std::string_view to_string(InjectedKind k) {
  return k == InjectedKind::CorrectiveShutdown ? "CorrectiveShutdown" : "PreventiveNight";
}

InjectedKind parse_injected_kind(std::string_view s) {
  if (s == "CorrectiveShutdown") return InjectedKind::CorrectiveShutdown;
  if (s == "PreventiveNight") return InjectedKind::PreventiveNight;
  throw Error("unknown injected event kind '" + std::string(s) + "'");
}

template <typename V, typename Get>
std::map<int, V> int_keyed(const nlohmann::json& j, Get get) {
  std::map<int, V> out;
  for (const auto& [k, v] : j.items()) out[io::parse_int(k)] = get(v);
  return out;
}

}  // namespace

std::array<double, 24> SimConfig::default_daily_profile() {
  // Closed 01:00-06:00; opening and closing hours carry no passengers so
  // every day has a no-load reference period. Peaks at 09:00, 14:00, 19:00.
  return {0, 0, 0, 0, 0, 0, 0, 600, 1300, 2000, 1100, 800,
          900, 1000, 1500, 900, 800, 1100, 1400, 1900, 1100, 800, 600, 400};
}

void validate(const SimConfig& cfg) {
  if (cfg.end_date < cfg.start_date) throw Error("simulation start date is after end date");
  if (cfg.fleet.empty()) throw Error("simulation fleet is empty");
  for (const auto& m : cfg.fleet) validate(m);
  for (double v : cfg.daily_profile) {
    if (!(v >= 0.0)) throw Error("daily profile intensities must be >= 0");
  }
  for (const auto& [id, v] : cfg.load_scale) {
    if (!(v >= 0.0)) throw Error("load scale must be >= 0");
  }
  for (const auto& [id, v] : cfg.fixed_loss_wh_per_min) {
    if (!(v >= 0.0)) throw Error("fixed loss must be >= 0");
  }
  for (const auto& [id, v] : cfg.daily_passengers) {
    if (v < 0) throw Error("daily passengers must be >= 0");
  }
  for (const auto& e : cfg.injected_events) {
    if (e.duration_min <= 0) throw Error("injected event duration must be > 0");
    meta_of(cfg, e.escalator_id);
  }
  if (!(cfg.noise_fraction >= 0.0 && cfg.noise_fraction < 1.0)) throw Error("noise fraction must be in [0, 1)");
  if (!(cfg.down_load_cap > 0.0 && cfg.down_load_cap < 1.0)) throw Error("down load cap must be in (0, 1)");
  if (cfg.spectrum_bins < 16 || cfg.spectrum_bins % 128 != 0) {
    throw Error("spectrum bin count must be a positive multiple of 128 (0.5 kHz edges must land on bins)");
  }
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  try {
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("fleet")) cfg.fleet = fleet_from_json(j.at("fleet"));
    cfg.start_date = parse_date(j.at("start_date").get<std::string>());
    cfg.end_date = parse_date(j.at("end_date").get<std::string>());
    cfg.utc_offset_minutes = j.value("utc_offset_minutes", cfg.utc_offset_minutes);
    if (j.contains("age_reference_date")) cfg.age_reference = parse_date(j.at("age_reference_date").get<std::string>());
    if (j.contains("daily_profile")) {
      const auto v = j.at("daily_profile").get<std::vector<double>>();
      if (v.size() != 24) throw Error("daily_profile must have 24 hourly values");
      std::copy(v.begin(), v.end(), cfg.daily_profile.begin());
    }
    auto as_double = [](const nlohmann::json& v) { return v.get<double>(); };
    if (j.contains("load_scale")) cfg.load_scale = int_keyed<double>(j.at("load_scale"), as_double);
    if (j.contains("fixed_loss_wh_per_min")) {
      cfg.fixed_loss_wh_per_min = int_keyed<double>(j.at("fixed_loss_wh_per_min"), as_double);
    }
    if (j.contains("daily_passengers")) {
      cfg.daily_passengers = int_keyed<long>(j.at("daily_passengers"), [](const nlohmann::json& v) { return v.get<long>(); });
    }
    if (j.contains("degradation")) {
      cfg.degradation = int_keyed<Degradation>(j.at("degradation"), [](const nlohmann::json& v) {
        return Degradation{v.at("a").get<double>(), v.at("b").get<double>()};
      });
    }
    if (j.contains("injected_events")) {
      for (const auto& e : j.at("injected_events")) {
        InjectedEvent ev;
        ev.date = parse_date(e.at("date").get<std::string>());
        ev.escalator_id = e.at("escalator").get<int>();
        ev.kind = parse_injected_kind(e.at("kind").get<std::string>());
        ev.start = e.contains("start") ? parse_clock(e.at("start").get<std::string>())
                                       : (ev.kind == InjectedKind::CorrectiveShutdown ? ClockTime{12 * 60}
                                                                                       : ClockTime{2 * 60});
        ev.duration_min = e.at("duration_min").get<int>();
        cfg.injected_events.push_back(ev);
      }
    }
    cfg.noise_fraction = j.value("noise_fraction", cfg.noise_fraction);
    cfg.down_load_cap = j.value("down_load_cap", cfg.down_load_cap);
    cfg.standby_wh = j.value("standby_wh", cfg.standby_wh);
    cfg.spectrum_bins = j.value("spectrum_bin_count", cfg.spectrum_bins);
    if (j.contains("spectrum_times")) {
      cfg.spectrum_times.clear();
      for (const auto& t : j.at("spectrum_times")) cfg.spectrum_times.push_back(parse_clock(t.get<std::string>()));
    }
    cfg.write_spectra = j.value("write_spectra", cfg.write_spectra);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid simulation config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

nlohmann::json to_json(const SimConfig& cfg) {
  auto keyed = [](const auto& m, auto conv) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : m) o[std::to_string(k)] = conv(v);
    return o;
  };
  auto same = [](auto v) { return v; };
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : cfg.injected_events) {
    events.push_back({{"date", format_date(e.date)},
                      {"escalator", e.escalator_id},
                      {"kind", to_string(e.kind)},
                      {"start", format_clock(e.start)},
                      {"duration_min", e.duration_min}});
  }
  nlohmann::json times = nlohmann::json::array();
  for (auto t : cfg.spectrum_times) times.push_back(format_clock(t));
  return nlohmann::json{
      {"seed", cfg.seed},
      {"fleet", fleet_to_json(cfg.fleet)},
      {"start_date", format_date(cfg.start_date)},
      {"end_date", format_date(cfg.end_date)},
      {"utc_offset_minutes", cfg.utc_offset_minutes},
      {"age_reference_date", format_date(cfg.age_reference)},
      {"daily_profile", cfg.daily_profile},
      {"load_scale", keyed(cfg.load_scale, same)},
      {"fixed_loss_wh_per_min", keyed(cfg.fixed_loss_wh_per_min, same)},
      {"daily_passengers", keyed(cfg.daily_passengers, same)},
      {"degradation", keyed(cfg.degradation, [](const Degradation& d) { return nlohmann::json{{"a", d.a}, {"b", d.b}}; })},
      {"injected_events", events},
      {"noise_fraction", cfg.noise_fraction},
      {"down_load_cap", cfg.down_load_cap},
      {"standby_wh", cfg.standby_wh},
      {"spectrum_bin_count", cfg.spectrum_bins},
      {"spectrum_times", times},
      {"write_spectra", cfg.write_spectra},
  };
}

LocalClock clock_of(const SimConfig& cfg) { return LocalClock{std::chrono::minutes{cfg.utc_offset_minutes}}; }

double fixed_loss_of(const SimConfig& cfg, const EscalatorMeta& meta) {
  if (auto it = cfg.fixed_loss_wh_per_min.find(meta.id); it != cfg.fixed_loss_wh_per_min.end()) return it->second;
  return runs_down(meta) ? 18.0 + 1.2 * meta.rise_m : 20.0 + 1.2 * meta.rise_m;
}

Degradation degradation_of(const SimConfig& cfg, int escalator_id) {
  if (auto it = cfg.degradation.find(escalator_id); it != cfg.degradation.end()) return it->second;
  Rng rng(cfg.seed, kDefaults, escalator_id);
  return Degradation{rng.uniform(0.02, 0.06), 0.07};
}

nlohmann::json to_json(const DayTruth& t) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : t.events) {
    events.push_back({{"kind", energy::to_string(e.kind)},
                      {"start_utc", format_timestamp(e.start)},
                      {"duration_min", e.duration_min}});
  }
  return nlohmann::json{{"escalator_id", t.escalator_id},
                        {"service_date", format_date(t.service_date)},
                        {"fixed_loss_wh_per_min", t.fixed_loss_wh_per_min},
                        {"passengers", t.passengers},
                        {"variable_loss_wh", t.variable_loss_wh},
                        {"events", events}};
}

EnergyDay generate_energy_day(const SimConfig& cfg, int escalator_id, Date service_date) {
  const EscalatorMeta& meta = meta_of(cfg, escalator_id);
  if (service_date < cfg.start_date || service_date > cfg.end_date) {
    throw Error("date " + format_date(service_date) + " outside the simulated range");
  }
  const LocalClock clock = clock_of(cfg);
  const ServiceWindow& window = meta.service_window;
  const double e_f = fixed_loss_of(cfg, meta);
  const double e_p = energy::passenger_energy_wh(meta);
  const bool down = runs_down(meta);
  Rng rng(cfg.seed, kEnergy, escalator_id, day_key(service_date));

  enum class Slot : unsigned char { Off, Running, Shutdown, Preventive };
  std::array<Slot, kMinutesPerDay> state{};
  for (int s = 0; s < kMinutesPerDay; ++s) state[s] = window.contains_slot(s) ? Slot::Running : Slot::Off;

  EnergyDay day;
  day.truth.escalator_id = escalator_id;
  day.truth.service_date = service_date;
  day.truth.fixed_loss_wh_per_min = e_f;

  for (const auto& ev : cfg.injected_events) {
    if (ev.escalator_id != escalator_id || ev.date != service_date) continue;
    const int first = clock_to_slot(ev.start);
    const int last = std::min(first + ev.duration_min, kMinutesPerDay);
    const bool corrective = ev.kind == InjectedKind::CorrectiveShutdown;
    for (int s = first; s < last; ++s) {
      if (corrective && state[s] != Slot::Off) state[s] = Slot::Shutdown;
      if (!corrective && state[s] == Slot::Off) state[s] = Slot::Preventive;
    }
    day.truth.events.push_back({corrective ? energy::EventKind::Corrective : energy::EventKind::Preventive,
                                clock.slot_time(service_date, first), last - first});
  }

  // Passenger allocation over running minutes: draw the daily total, then
  // distribute by largest remainder so the ground truth is exact.
  std::vector<int> running;
  std::vector<double> weight;
  double expected_total = 0.0;
  const double scale = cfg.load_scale.count(escalator_id) ? cfg.load_scale.at(escalator_id) : 1.0;
  for (int s = 0; s < kMinutesPerDay; ++s) {
    if (state[s] != Slot::Running) continue;
    const int hour = ((s + kServiceDayStartMinute) / 60) % 24;
    const double lambda = cfg.daily_profile[static_cast<std::size_t>(hour)] * scale / 60.0;
    running.push_back(s);
    weight.push_back(lambda * rng.uniform(0.5, 1.5));
    expected_total += lambda;
  }
  long target = 0;
  if (auto it = cfg.daily_passengers.find(escalator_id); it != cfg.daily_passengers.end()) {
    target = it->second;
  } else {
    target = std::lround(expected_total * rng.uniform(0.9, 1.1));
  }

  const long cap = down ? static_cast<long>(std::floor(cfg.down_load_cap * e_f / e_p)) : std::numeric_limits<long>::max();
  std::vector<long> count(running.size(), 0);
  const double weight_sum = std::accumulate(weight.begin(), weight.end(), 0.0);
  if (target > 0 && weight_sum > 0.0 && cap > 0) {
    std::vector<double> frac(running.size());
    long assigned = 0;
    for (std::size_t i = 0; i < running.size(); ++i) {
      const double share = static_cast<double>(target) * weight[i] / weight_sum;
      count[i] = std::min(cap, static_cast<long>(std::floor(share)));
      frac[i] = share - std::floor(share);
      assigned += count[i];
    }
    std::vector<std::size_t> order(running.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    while (assigned < target) {
      bool progressed = false;
      for (std::size_t i : order) {
        if (assigned >= target) break;
        if (weight[i] > 0.0 && count[i] < cap) {
          ++count[i];
          ++assigned;
          progressed = true;
        }
      }
      if (!progressed) break;
    }
  }

  std::array<long, kMinutesPerDay> per_slot{};
  for (std::size_t i = 0; i < running.size(); ++i) {
    per_slot[static_cast<std::size_t>(running[i])] = count[i];
    day.truth.passengers += count[i];
  }
  day.truth.variable_loss_wh = static_cast<double>(day.truth.passengers) * e_p;

  day.minutes.reserve(kMinutesPerDay);
  for (int s = 0; s < kMinutesPerDay; ++s) {
    double clean = 0.0;
    switch (state[s]) {
      case Slot::Off: clean = 0.0; break;
      case Slot::Shutdown: clean = cfg.standby_wh; break;
      case Slot::Preventive: clean = e_f; break;
      case Slot::Running: {
        const double load = static_cast<double>(per_slot[s]) * e_p;
        clean = down ? e_f - load : e_f + load;
        break;
      }
    }
    const double e_t = clean * (1.0 + cfg.noise_fraction * rng.uniform(-1.0, 1.0));
    energy::EnergyMinute m;
    m.escalator_id = escalator_id;
    m.timestamp = clock.slot_time(service_date, s);
    // Downward units export part of the reading as regenerated energy.
    m.e_exp_wh = down && per_slot[s] > 0 ? 0.25 * e_t : 0.0;
    m.e_imp_wh = e_t - m.e_exp_wh;
    day.minutes.push_back(m);
  }
  return day;
}

vibration::SpectrumRecord generate_spectrum(const SimConfig& cfg, int escalator_id, int point_id, Timestamp t) {
  const SensorPoint& point = sensor_point(point_id);
  const EscalatorMeta& meta = meta_of(cfg, escalator_id);
  const LocalClock clock = clock_of(cfg);
  const Degradation deg = degradation_of(cfg, escalator_id);
  const double age = age_at(meta, clock.local_date(t), cfg.age_reference);
  const double level = deg.a * std::exp(deg.b * age);

  Rng point_rng(cfg.seed, kPointGain, escalator_id, point_id);
  const double point_gain = point_rng.uniform(0.8, 1.2);
  Rng rng(cfg.seed, kSpectrum, escalator_id, point_id, static_cast<std::uint64_t>(t.time_since_epoch().count()));
  const double record_gain = rng.uniform(0.75, 1.25);

  vibration::SpectrumRecord spec;
  spec.escalator_id = escalator_id;
  spec.point_id = point_id;
  spec.timestamp = t;
  spec.bin_hz = vibration::kSpectrumMaxHz / cfg.spectrum_bins;
  spec.magnitudes.assign(static_cast<std::size_t>(cfg.spectrum_bins), 0.0);

  const vibration::BandSelection band = vibration::default_band_selection(point.freq_class);
  const auto dominant = vibration::band_bins(spec, band.band_lo_khz, band.band_hi_khz);
  const auto noise = vibration::band_bins(spec, 0.0, 0.5);
  // Per-bin amplitude that makes the band's A_t equal `level` on average.
  const double base = level * point_gain * record_gain * std::sqrt(vibration::kAtDivisor / dominant.size());
  const bool spiky = rng.uniform() < 0.3;

  for (std::size_t i = 0; i < spec.magnitudes.size(); ++i) {
    double m;
    if (i >= dominant.first && i < dominant.last) {
      m = base * rng.uniform(0.7, 1.3);
    } else if (i < noise.last) {
      m = base * rng.uniform(0.15, 0.45);
      if (spiky && rng.uniform() < 0.1) m = base * rng.uniform(5.0, 20.0);
    } else {
      m = base * rng.uniform(0.04, 0.12);
    }
    spec.magnitudes[i] = m;
  }
  return spec;
}

std::vector<vibration::SpectrumRecord> generate_spectra_day(const SimConfig& cfg, int escalator_id, Date service_date) {
  const LocalClock clock = clock_of(cfg);
  std::vector<ClockTime> times = cfg.spectrum_times;
  std::sort(times.begin(), times.end(), [](ClockTime a, ClockTime b) { return clock_to_slot(a) < clock_to_slot(b); });
  std::vector<vibration::SpectrumRecord> out;
  for (int p = 1; p <= kSensorCount; ++p) {
    for (ClockTime ct : times) out.push_back(generate_spectrum(cfg, escalator_id, p, clock.service_clock_time(service_date, ct)));
  }
  return out;
}

CorpusSummary write_raw_corpus(const SimConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  namespace fs = std::filesystem;
  CorpusSummary summary;
  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "fleet.json", fleet_to_json(cfg.fleet).dump(2) + "\n");
  const nlohmann::json site{{"utc_offset_minutes", cfg.utc_offset_minutes},
                            {"age_reference_date", format_date(cfg.age_reference)}};
  io::write_file_atomic(out_dir / "site.json", site.dump(2) + "\n");
  summary.files += 2;

  for (const auto& meta : cfg.fleet) {
    const std::string id = std::to_string(meta.id);
    for (Date d = cfg.start_date; d <= cfg.end_date; d += std::chrono::days{1}) {
      const std::string date = format_date(d);
      const EnergyDay day = generate_energy_day(cfg, meta.id, d);
      std::string csv(io::kEnergyHeader);
      csv += '\n';
      for (const auto& m : day.minutes) {
        csv += io::format_energy_row(m, false, 4);
        csv += '\n';
      }
      io::write_file_atomic(out_dir / "energy" / id / (date + ".csv"), csv);
      io::write_file_atomic(out_dir / "truth" / id / (date + ".json"), to_json(day.truth).dump(2) + "\n");
      summary.files += 2;
      summary.energy_rows += day.minutes.size();

      if (cfg.write_spectra && !cfg.spectrum_times.empty()) {
        std::string jsonl;
        for (const auto& s : generate_spectra_day(cfg, meta.id, d)) {
          jsonl += io::format_spectrum_jsonl(s, 6);
          jsonl += '\n';
          ++summary.spectra;
        }
        io::write_file_atomic(out_dir / "vibration" / id / (date + ".jsonl"), jsonl);
        ++summary.files;
      }
    }
  }
  return summary;
}

}  // namespace escalife::synth
