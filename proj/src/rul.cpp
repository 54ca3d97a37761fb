#include "escalife/rul.hpp"

#include "escalife/error.hpp"

namespace escalife::rul {

double estimated_age(double lhi, const health::LhiModel& model) {
  if (!(lhi > 0.0)) throw Error("estimated_age: LHI must be positive");
  return model.inverse(lhi);
}

RulResult remaining_useful_life(double lhi, double actual_age, const health::LhiModel& model) {
  if (!(actual_age >= 0.0)) throw Error("remaining_useful_life: actual age must be non-negative");
  RulResult r;
  r.actual_age = actual_age;
  r.lhi_used = lhi;
  r.estimated_age = estimated_age(lhi, model);
  r.rul_years = model.t_end_years - r.estimated_age;
  r.end_age_years = actual_age + r.rul_years;
  return r;
}

ShiftedCurve shifted_curve(double lhi, double actual_age, const health::LhiModel& model,
                           std::span<const double> sample_ages) {
  ShiftedCurve c;
  c.shift_years = actual_age - estimated_age(lhi, model);
  c.truncation_age = model.inverse(model.y_end) + c.shift_years;
  for (double t : sample_ages) {
    if (t > c.truncation_age) continue;
    c.points.emplace_back(t, model.value_at(t - c.shift_years));
  }
  return c;
}

}  // namespace escalife::rul
