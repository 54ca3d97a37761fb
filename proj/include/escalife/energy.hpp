#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "escalife/domain.hpp"
#include "escalife/time.hpp"

namespace escalife::energy {

inline constexpr double kGravity = 9.81;        // m/s^2
inline constexpr double kPassengerMassKg = 75.0;
inline constexpr double kWalkingFactorUp = 0.85;
inline constexpr double kWalkingFactorDown = 0.75;
/// In-service readings below this indicate a shutdown.
inline constexpr double kShutdownWh = 5.0;

struct EnergyMinute {
  int escalator_id = 0;
  Timestamp timestamp{};
  double e_imp_wh = 0.0;
  double e_exp_wh = 0.0;
  std::optional<double> current_a;
  std::optional<double> voltage_v;
};

inline double total_energy(const EnergyMinute& rec) { return rec.e_imp_wh + rec.e_exp_wh; }

/// 1440 one-minute slots from 04:00 local on `service_date`. Missing minutes
/// hold NaN.
struct ServiceDayProfile {
  int escalator_id = 0;
  Date service_date{};
  std::array<double, kMinutesPerDay> e_total_wh;

  ServiceDayProfile() { e_total_wh.fill(std::numeric_limits<double>::quiet_NaN()); }

  bool missing(int slot) const { return std::isnan(e_total_wh[static_cast<std::size_t>(slot)]); }
  int missing_count() const;
  int missing_in(const ServiceWindow& window) const;
};

/// Groups a timestamp-sorted stream (one escalator) into service days.
/// Throws on unsorted input, duplicate minutes or mixed escalators.
std::vector<ServiceDayProfile> regroup_service_days(std::span<const EnergyMinute> stream, const LocalClock& clock);

/// In-window slots that are present and running (E_T >= 5 Wh).
std::vector<int> working_slots(const ServiceDayProfile& profile, const ServiceWindow& window);
int working_minutes(const ServiceDayProfile& profile, const ServiceWindow& window);

/// Lower-interpolation order statistic: sorted[floor(q * (n - 1))].
double lower_percentile(std::vector<double> values, double q);

/// No-load energy per minute: P5 of working minutes for upward units, P95 for
/// downward ones (where load depresses the reading).
double estimate_fixed_loss(const ServiceDayProfile& profile, const ServiceWindow& window, Direction direction);

/// Daily variable loss: sum over working minutes of the load-driven deviation
/// from E_F, clamped at zero per minute.
double decompose_variable_loss(const ServiceDayProfile& profile, const ServiceWindow& window, double fixed_loss,
                               Direction direction);

double walking_factor(Direction direction);

/// Energy (Wh) to carry one passenger over the escalator's rise.
double passenger_energy_wh(const EscalatorMeta& meta);

double estimate_passengers(double variable_loss_wh, const EscalatorMeta& meta);

enum class EventKind { Corrective, Preventive };

std::string_view to_string(EventKind k);

struct MaintenanceEvent {
  EventKind kind = EventKind::Corrective;
  Timestamp start{};
  int duration_min = 0;
};

struct EventOptions {
  int min_duration_min = 10;
  double threshold_wh = kShutdownWh;
};

/// Corrective: in-window runs below the threshold. Preventive: out-of-window
/// runs at or above it. Missing minutes break runs.
std::vector<MaintenanceEvent> detect_events(const ServiceDayProfile& profile, const ServiceWindow& window,
                                            const LocalClock& clock, const EventOptions& options = {});

struct DailyFeatures {
  int escalator_id = 0;
  Date service_date{};
  int working_min = 0;
  /// NaN when the day has no working minutes.
  double fixed_loss_wh_min = std::numeric_limits<double>::quiet_NaN();
  double variable_loss_wh = 0.0;
  double passengers = 0.0;
  int corrective_events = 0;
  int preventive_events = 0;
  int missing_window_min = 0;
};

/// Days with more than this fraction of in-window minutes missing are left
/// out of quarterly aggregation.
inline constexpr double kMaxMissingFraction = 0.10;

bool excluded_from_aggregation(const DailyFeatures& day, const ServiceWindow& window);

DailyFeatures process_day(const ServiceDayProfile& profile, const EscalatorMeta& meta, const LocalClock& clock,
                          const EventOptions& options = {});

}  // namespace escalife::energy
