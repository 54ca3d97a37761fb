#include "escalife/energy.hpp"

#include <algorithm>

#include "escalife/error.hpp"

namespace escalife::energy {

int ServiceDayProfile::missing_count() const {
  return static_cast<int>(std::count_if(e_total_wh.begin(), e_total_wh.end(), [](double v) { return std::isnan(v); }));
}

int ServiceDayProfile::missing_in(const ServiceWindow& window) const {
  int n = 0;
  for (int s = window.first_slot(); s < window.end_slot(); ++s) n += missing(s) ? 1 : 0;
  return n;
}

std::vector<ServiceDayProfile> regroup_service_days(std::span<const EnergyMinute> stream, const LocalClock& clock) {
  std::vector<ServiceDayProfile> days;
  if (stream.empty()) return days;
  const int id = stream.front().escalator_id;
  std::optional<Timestamp> prev_minute;
  for (const auto& rec : stream) {
    if (rec.escalator_id != id) throw Error("regroup_service_days: stream mixes escalators");
    const Timestamp minute = std::chrono::floor<std::chrono::minutes>(rec.timestamp);
    if (prev_minute) {
      if (minute == *prev_minute) {
        throw Error("duplicate energy record for escalator " + std::to_string(id) + " at " + format_timestamp(minute));
      }
      if (minute < *prev_minute) throw Error("regroup_service_days: timestamps are not sorted");
    }
    prev_minute = minute;

    const Date day = clock.service_date(minute);
    if (days.empty() || days.back().service_date != day) {
      days.emplace_back();
      days.back().escalator_id = id;
      days.back().service_date = day;
    }
    days.back().e_total_wh[static_cast<std::size_t>(clock.service_slot(minute))] = total_energy(rec);
  }
  return days;
}

std::vector<int> working_slots(const ServiceDayProfile& profile, const ServiceWindow& window) {
  std::vector<int> slots;
  for (int s = window.first_slot(); s < window.end_slot(); ++s) {
    if (!profile.missing(s) && profile.e_total_wh[static_cast<std::size_t>(s)] >= kShutdownWh) slots.push_back(s);
  }
  return slots;
}

int working_minutes(const ServiceDayProfile& profile, const ServiceWindow& window) {
  return static_cast<int>(working_slots(profile, window).size());
}

double lower_percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("lower_percentile: no values");
  const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
  return values[k];
}

double estimate_fixed_loss(const ServiceDayProfile& profile, const ServiceWindow& window, Direction direction) {
  std::vector<double> values;
  for (int s : working_slots(profile, window)) values.push_back(profile.e_total_wh[static_cast<std::size_t>(s)]);
  if (values.empty()) {
    throw Error("estimate_fixed_loss: escalator " + std::to_string(profile.escalator_id) + " has no working minutes on " +
                format_date(profile.service_date));
  }
  return lower_percentile(std::move(values), direction == Direction::Down ? 0.95 : 0.05);
}

double decompose_variable_loss(const ServiceDayProfile& profile, const ServiceWindow& window, double fixed_loss,
                               Direction direction) {
  double total = 0.0;
  for (int s : working_slots(profile, window)) {
    const double e_t = profile.e_total_wh[static_cast<std::size_t>(s)];
    const double v = direction == Direction::Down ? fixed_loss - e_t : e_t - fixed_loss;
    total += std::max(0.0, v);
  }
  return total;
}

double walking_factor(Direction direction) {
  return direction == Direction::Down ? kWalkingFactorDown : kWalkingFactorUp;
}

double passenger_energy_wh(const EscalatorMeta& meta) {
  if (!(meta.rise_m > 0.0)) throw Error("passenger_energy_wh: rise must be positive");
  return kGravity * meta.rise_m * kPassengerMassKg * walking_factor(meta.direction) / 3600.0;
}

double estimate_passengers(double variable_loss_wh, const EscalatorMeta& meta) {
  if (!(variable_loss_wh >= 0.0)) throw Error("estimate_passengers: variable loss must be non-negative");
  return variable_loss_wh * 3600.0 / (kGravity * meta.rise_m * kPassengerMassKg * walking_factor(meta.direction));
}

std::string_view to_string(EventKind k) { return k == EventKind::Corrective ? "Corrective" : "Preventive"; }

std::vector<MaintenanceEvent> detect_events(const ServiceDayProfile& profile, const ServiceWindow& window,
                                            const LocalClock& clock, const EventOptions& options) {
  std::vector<MaintenanceEvent> events;
  auto scan = [&](int from, int to, EventKind kind) {
    int run_start = -1;
    auto close = [&](int end) {
      if (run_start >= 0 && end - run_start >= options.min_duration_min) {
        events.push_back({kind, clock.slot_time(profile.service_date, run_start), end - run_start});
      }
      run_start = -1;
    };
    for (int s = from; s < to; ++s) {
      bool hit = false;
      if (!profile.missing(s)) {
        const double e = profile.e_total_wh[static_cast<std::size_t>(s)];
        hit = kind == EventKind::Corrective ? e < options.threshold_wh : e >= options.threshold_wh;
      }
      if (hit) {
        if (run_start < 0) run_start = s;
      } else {
        close(s);
      }
    }
    close(to);
  };
  scan(0, window.first_slot(), EventKind::Preventive);
  scan(window.first_slot(), window.end_slot(), EventKind::Corrective);
  scan(window.end_slot(), kMinutesPerDay, EventKind::Preventive);
  std::sort(events.begin(), events.end(),
            [](const MaintenanceEvent& a, const MaintenanceEvent& b) { return a.start < b.start; });
  return events;
}

bool excluded_from_aggregation(const DailyFeatures& day, const ServiceWindow& window) {
  return static_cast<double>(day.missing_window_min) > kMaxMissingFraction * window.length_min();
}

DailyFeatures process_day(const ServiceDayProfile& profile, const EscalatorMeta& meta, const LocalClock& clock,
                          const EventOptions& options) {
  const ServiceWindow& window = meta.service_window;
  DailyFeatures f;
  f.escalator_id = profile.escalator_id;
  f.service_date = profile.service_date;
  f.working_min = working_minutes(profile, window);
  f.missing_window_min = profile.missing_in(window);
  if (f.working_min > 0) {
    f.fixed_loss_wh_min = estimate_fixed_loss(profile, window, meta.direction);
    f.variable_loss_wh = decompose_variable_loss(profile, window, f.fixed_loss_wh_min, meta.direction);
    f.passengers = estimate_passengers(f.variable_loss_wh, meta);
  }
  for (const auto& e : detect_events(profile, window, clock, options)) {
    (e.kind == EventKind::Corrective ? f.corrective_events : f.preventive_events) += 1;
  }
  return f;
}

}  // namespace escalife::energy
