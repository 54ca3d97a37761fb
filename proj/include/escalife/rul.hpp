#pragma once

#include <span>
#include <utility>
#include <vector>

#include "escalife/health.hpp"

namespace escalife::rul {

struct RulResult {
  int escalator_id = 0;
  Quarter quarter{};
  double actual_age = 0.0;
  double estimated_age = 0.0;
  double rul_years = 0.0;
  /// actual_age + rul_years: where the shifted curve reaches y_end.
  double end_age_years = 0.0;
  double lhi_used = 0.0;
};

/// Condition-equivalent age F^-1(y). Negative when y < a; not clamped.
double estimated_age(double lhi, const health::LhiModel& model);

RulResult remaining_useful_life(double lhi, double actual_age, const health::LhiModel& model);

struct ShiftedCurve {
  /// Reference curve shifted right by delta = actual_age - F^-1(y).
  double shift_years = 0.0;
  /// Age at which the shifted curve reaches y_end.
  double truncation_age = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Samples the shifted curve at `sample_ages`, dropping samples beyond the
/// truncation age.
ShiftedCurve shifted_curve(double lhi, double actual_age, const health::LhiModel& model,
                           std::span<const double> sample_ages);

}  // namespace escalife::rul
