#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/domain.hpp"
#include "escalife/energy.hpp"
#include "escalife/vibration.hpp"

namespace escalife::health {

enum class LhiVariable { WorkingTime, PassengerLoad, FixedLossResidual, ExceedanceArea, FaultCount };

inline constexpr std::array<LhiVariable, 5> kLhiVariables{
    LhiVariable::WorkingTime, LhiVariable::PassengerLoad, LhiVariable::FixedLossResidual,
    LhiVariable::ExceedanceArea, LhiVariable::FaultCount};

std::string_view to_string(LhiVariable v);
LhiVariable parse_lhi_variable(std::string_view text);

/// Min-max bounds and LHI weight of one variable.
struct VariableSpec {
  double min;
  double max;
  double weight;
};

/// Working time in minutes, passengers, Wh/min, exceedance area, event count.
const VariableSpec& variable_spec(LhiVariable v);

/// (raw - min) / (max - min), clamped to [0, 1].
double normalize(double raw, LhiVariable v);
double normalize(double raw, std::string_view variable_kind);

struct LhiInputs {
  double working_time = 0.0;
  double passenger_load = 0.0;
  double fixed_loss_residual = 0.0;
  double exceedance_area = 0.0;
  double fault_count = 0.0;

  double get(LhiVariable v) const;
  double& get(LhiVariable v);
};

LhiInputs normalize(const LhiInputs& raw);

/// Weighted sum 0.2 T + 0.2 P + 0.2 L + 0.3 N + 0.1 C of normalised inputs.
double compute_lhi(const LhiInputs& normalized);

struct QuarterFeatures {
  int escalator_id = 0;
  Quarter quarter{};
  double age_years = 0.0;
  LhiInputs raw{};
  LhiInputs normalized{};
  double lhi = 0.0;
};

QuarterFeatures make_quarter_features(int escalator_id, Quarter quarter, double age_years, const LhiInputs& raw);

/// Same, from already-normalised values (raw is set to normalized * max).
QuarterFeatures quarter_features_from_normalized(int escalator_id, Quarter quarter, double age_years,
                                                 const LhiInputs& normalized);

struct CumulativeTotals {
  double working_min = 0.0;
  double passengers = 0.0;
};

struct AggregationOptions {
  vibration::MissingSensorPolicy missing_sensors = vibration::MissingSensorPolicy::Error;
  std::array<double, kSensorCount> sensor_weights = default_sensor_weights();
};

/// Median daily E_F over the given (first monitored quarter) days.
double baseline_fixed_loss(std::span<const energy::DailyFeatures> first_quarter_days, const ServiceWindow& window);

/// Builds one escalator-quarter. `days` and `at_records` must already be
/// restricted to the quarter (A_t records post daily reduction). Without
/// `prior`, lifetime totals before the first usable day are extrapolated as
/// age at that day times the observed mean daily value.
struct QuarterAggregate {
  QuarterFeatures features;
  CumulativeTotals cumulative;
};

QuarterAggregate aggregate_quarter(const EscalatorMeta& meta, Quarter quarter, Date age_reference,
                                   std::span<const energy::DailyFeatures> days,
                                   std::span<const vibration::AtRecord> at_records,
                                   const std::optional<CumulativeTotals>& prior, double baseline_fixed_loss_wh_min,
                                   const AggregationOptions& options = {});

// Reference model ------------------------------------------------------------

inline constexpr double kDefaultEndOfLifeYears = 35.0;

struct LhiModel {
  double a = 0.0928;
  double b = 0.0665;
  double t_end_years = kDefaultEndOfLifeYears;
  double y_end = 0.0928 * std::exp(0.0665 * kDefaultEndOfLifeYears);
  std::vector<std::pair<int, Quarter>> fitted_on;
  std::vector<int> excluded;

  /// a * exp(b * t)
  double value_at(double age_years) const;
  /// ln(y / a) / b
  double inverse(double lhi) const;

  void set_end_of_life(double t_end);

  /// a = 0.0928, b = 0.0665, t_end = 35.
  static LhiModel reference();
};

void validate(const LhiModel& model);
nlohmann::json to_json(const LhiModel& model);
LhiModel lhi_model_from_json(const nlohmann::json& j);

struct FitPoint {
  int escalator_id = 0;
  Quarter quarter{};
  double age_years = 0.0;
  double lhi = 0.0;
};

struct FitOptions {
  double t_end_years = kDefaultEndOfLifeYears;
  std::vector<int> exclude_ids;
  /// Drop this many points with the largest |log residual| from a first pass.
  std::size_t auto_exclude = 0;
  /// Polish the log-space fit with Gauss-Newton on the direct residuals.
  bool refine = false;
};

struct ExponentialFit {
  double a;
  double b;
};

/// Least squares of ln y = ln a + b t.
ExponentialFit fit_exponential(std::span<const double> ages, std::span<const double> lhi);

/// Gauss-Newton on sum (a exp(b t) - y)^2, started from `start`.
ExponentialFit refine_exponential(std::span<const double> ages, std::span<const double> lhi, ExponentialFit start);

LhiModel fit_reference_model(std::span<const FitPoint> points, const FitOptions& options = {});

}  // namespace escalife::health
