#include "escalife/health.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "escalife/error.hpp"

namespace escalife::health {

std::string_view to_string(LhiVariable v) {
  switch (v) {
    case LhiVariable::WorkingTime: return "working_time";
    case LhiVariable::PassengerLoad: return "passenger_load";
    case LhiVariable::FixedLossResidual: return "fixed_loss_residual";
    case LhiVariable::ExceedanceArea: return "exceedance_area";
    case LhiVariable::FaultCount: return "fault_count";
  }
  return "?";
}

LhiVariable parse_lhi_variable(std::string_view text) {
  for (LhiVariable v : kLhiVariables) {
    if (text == to_string(v)) return v;
  }
  if (text == "T") return LhiVariable::WorkingTime;
  if (text == "P") return LhiVariable::PassengerLoad;
  if (text == "L") return LhiVariable::FixedLossResidual;
  if (text == "N") return LhiVariable::ExceedanceArea;
  if (text == "C") return LhiVariable::FaultCount;
  throw Error("unknown LHI variable kind '" + std::string(text) + "'");
}

const VariableSpec& variable_spec(LhiVariable v) {
  // Maxima correspond to 35 years of end-of-life duty (20 h/day,
  // 26,000 passengers/day) for the cumulative variables.
  static const std::array<VariableSpec, 5> specs{{
      {0.0, 15'330'000.0, 0.2},
      {0.0, 332'150'000.0, 0.2},
      {0.0, 19.61, 0.2},
      {0.0, 0.15, 0.3},
      {0.0, 33.0, 0.1},
  }};
  return specs[static_cast<std::size_t>(v)];
}

double normalize(double raw, LhiVariable v) {
  if (!(raw >= 0.0)) throw Error("normalize: raw value must be non-negative");
  const VariableSpec& s = variable_spec(v);
  return std::clamp((raw - s.min) / (s.max - s.min), 0.0, 1.0);
}

double normalize(double raw, std::string_view variable_kind) { return normalize(raw, parse_lhi_variable(variable_kind)); }

double LhiInputs::get(LhiVariable v) const {
  switch (v) {
    case LhiVariable::WorkingTime: return working_time;
    case LhiVariable::PassengerLoad: return passenger_load;
    case LhiVariable::FixedLossResidual: return fixed_loss_residual;
    case LhiVariable::ExceedanceArea: return exceedance_area;
    case LhiVariable::FaultCount: return fault_count;
  }
  return 0.0;
}

double& LhiInputs::get(LhiVariable v) {
  switch (v) {
    case LhiVariable::WorkingTime: return working_time;
    case LhiVariable::PassengerLoad: return passenger_load;
    case LhiVariable::FixedLossResidual: return fixed_loss_residual;
    case LhiVariable::ExceedanceArea: return exceedance_area;
    case LhiVariable::FaultCount: break;
  }
  return fault_count;
}

LhiInputs normalize(const LhiInputs& raw) {
  LhiInputs n;
  for (LhiVariable v : kLhiVariables) n.get(v) = normalize(raw.get(v), v);
  return n;
}

double compute_lhi(const LhiInputs& normalized) {
  double y = 0.0;
  for (LhiVariable v : kLhiVariables) y += variable_spec(v).weight * normalized.get(v);
  return y;
}

QuarterFeatures make_quarter_features(int escalator_id, Quarter quarter, double age_years, const LhiInputs& raw) {
  QuarterFeatures f;
  f.escalator_id = escalator_id;
  f.quarter = quarter;
  f.age_years = age_years;
  f.raw = raw;
  f.normalized = normalize(raw);
  f.lhi = compute_lhi(f.normalized);
  return f;
}

QuarterFeatures quarter_features_from_normalized(int escalator_id, Quarter quarter, double age_years,
                                                 const LhiInputs& normalized) {
  QuarterFeatures f;
  f.escalator_id = escalator_id;
  f.quarter = quarter;
  f.age_years = age_years;
  f.normalized = normalized;
  for (LhiVariable v : kLhiVariables) {
    const double n = normalized.get(v);
    if (!(n >= 0.0 && n <= 1.0)) throw Error("normalised LHI inputs must lie in [0, 1]");
    const VariableSpec& s = variable_spec(v);
    f.raw.get(v) = s.min + n * (s.max - s.min);
  }
  f.lhi = compute_lhi(normalized);
  return f;
}

double baseline_fixed_loss(std::span<const energy::DailyFeatures> first_quarter_days, const ServiceWindow& window) {
  std::vector<double> values;
  for (const auto& d : first_quarter_days) {
    if (!energy::excluded_from_aggregation(d, window) && std::isfinite(d.fixed_loss_wh_min)) {
      values.push_back(d.fixed_loss_wh_min);
    }
  }
  if (values.empty()) throw Error("baseline_fixed_loss: no usable days in the first monitored quarter");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

QuarterAggregate aggregate_quarter(const EscalatorMeta& meta, Quarter quarter, Date age_reference,
                                   std::span<const energy::DailyFeatures> days,
                                   std::span<const vibration::AtRecord> at_records,
                                   const std::optional<CumulativeTotals>& prior, double baseline_fixed_loss_wh_min,
                                   const AggregationOptions& options) {
  std::vector<const energy::DailyFeatures*> usable;
  double faults = 0.0;
  for (const auto& d : days) {
    if (d.escalator_id != meta.id || !quarter.contains(d.service_date)) {
      throw Error("aggregate_quarter: day outside escalator " + std::to_string(meta.id) + " / " + quarter.to_string());
    }
    faults += d.corrective_events;
    if (!energy::excluded_from_aggregation(d, meta.service_window)) usable.push_back(&d);
  }
  if (usable.empty()) {
    throw Error("escalator " + std::to_string(meta.id) + " has no usable energy days in " + quarter.to_string());
  }

  CumulativeTotals in_quarter;
  double residual_sum = 0.0;
  int residual_days = 0;
  for (const auto* d : usable) {
    in_quarter.working_min += d->working_min;
    in_quarter.passengers += d->passengers;
    if (std::isfinite(d->fixed_loss_wh_min)) {
      residual_sum += std::max(0.0, d->fixed_loss_wh_min - baseline_fixed_loss_wh_min);
      ++residual_days;
    }
  }

  CumulativeTotals before;
  if (prior) {
    before = *prior;
  } else {
    const Date first_day = usable.front()->service_date;
    const double years = std::max(0.0, age_at(meta, first_day, age_reference));
    const double n = static_cast<double>(usable.size());
    before.working_min = years * kDaysPerYear * in_quarter.working_min / n;
    before.passengers = years * kDaysPerYear * in_quarter.passengers / n;
  }

  std::array<std::vector<double>, kSensorCount> per_point;
  for (const auto& r : at_records) {
    if (r.escalator_id != meta.id) throw Error("aggregate_quarter: A_t record for another escalator");
    sensor_point(r.point_id);
    per_point[static_cast<std::size_t>(r.point_id - 1)].push_back(r.at_g);
  }
  std::array<std::optional<double>, kSensorCount> areas;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    if (!per_point[i].empty()) areas[i] = vibration::exceedance_area(per_point[i]);
  }

  QuarterAggregate out;
  out.cumulative = {before.working_min + in_quarter.working_min, before.passengers + in_quarter.passengers};

  LhiInputs raw;
  raw.working_time = out.cumulative.working_min;
  raw.passenger_load = out.cumulative.passengers;
  raw.fixed_loss_residual = residual_days > 0 ? residual_sum / residual_days : 0.0;
  raw.exceedance_area = vibration::fleet_vibration_status(areas, options.sensor_weights, options.missing_sensors);
  raw.fault_count = faults;

  out.features = make_quarter_features(meta.id, quarter, age_at(meta, quarter.end_day(), age_reference), raw);
  return out;
}

double LhiModel::value_at(double age_years) const { return a * std::exp(b * age_years); }

double LhiModel::inverse(double lhi) const {
  if (!(lhi > 0.0)) throw Error("LHI must be positive to invert the reference model");
  return std::log(lhi / a) / b;
}

void LhiModel::set_end_of_life(double t_end) {
  t_end_years = t_end;
  y_end = value_at(t_end);
}

LhiModel LhiModel::reference() {
  LhiModel m;
  m.a = 0.0928;
  m.b = 0.0665;
  m.set_end_of_life(kDefaultEndOfLifeYears);
  return m;
}

void validate(const LhiModel& model) {
  if (!(model.a > 0.0) || !(model.b > 0.0)) throw Error("LHI model requires a > 0 and b > 0");
  if (!std::isfinite(model.t_end_years)) throw Error("LHI model end of life must be finite");
  const double expected = model.value_at(model.t_end_years);
  if (std::abs(model.y_end - expected) > 1e-9 * std::max(1.0, expected)) {
    throw Error("LHI model y_end is inconsistent with a * exp(b * t_end)");
  }
}

nlohmann::json to_json(const LhiModel& model) {
  nlohmann::json fitted = nlohmann::json::array();
  for (const auto& [id, q] : model.fitted_on) fitted.push_back({{"escalator_id", id}, {"quarter", q.to_string()}});
  return nlohmann::json{{"a", model.a},
                        {"b", model.b},
                        {"t_end_years", model.t_end_years},
                        {"y_end", model.y_end},
                        {"fitted_on", fitted},
                        {"excluded", model.excluded}};
}

LhiModel lhi_model_from_json(const nlohmann::json& j) {
  try {
    LhiModel m;
    m.a = j.at("a").get<double>();
    m.b = j.at("b").get<double>();
    m.t_end_years = j.at("t_end_years").get<double>();
    m.y_end = j.at("y_end").get<double>();
    if (j.contains("fitted_on")) {
      for (const auto& p : j.at("fitted_on")) {
        m.fitted_on.emplace_back(p.at("escalator_id").get<int>(), Quarter::parse(p.at("quarter").get<std::string>()));
      }
    }
    if (j.contains("excluded")) m.excluded = j.at("excluded").get<std::vector<int>>();
    validate(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid model file: ") + e.what());
  }
}

ExponentialFit fit_exponential(std::span<const double> ages, std::span<const double> lhi) {
  if (ages.size() != lhi.size()) throw Error("fit_exponential: size mismatch");
  if (ages.size() < 3) throw Error("fit_exponential: at least 3 points required");
  const double n = static_cast<double>(ages.size());
  double mean_t = 0.0;
  double mean_ly = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    if (!(lhi[i] > 0.0)) throw Error("fit_exponential: LHI values must be positive");
    mean_t += ages[i];
    mean_ly += std::log(lhi[i]);
  }
  mean_t /= n;
  mean_ly /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    const double dt = ages[i] - mean_t;
    sxx += dt * dt;
    sxy += dt * (std::log(lhi[i]) - mean_ly);
  }
  if (!(sxx > 0.0)) throw Error("fit_exponential: ages must not all be equal");
  const double b = sxy / sxx;
  return {std::exp(mean_ly - b * mean_t), b};
}

ExponentialFit refine_exponential(std::span<const double> ages, std::span<const double> lhi, ExponentialFit start) {
  auto sse = [&](const ExponentialFit& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < ages.size(); ++i) {
      const double r = f.a * std::exp(f.b * ages[i]) - lhi[i];
      s += r * r;
    }
    return s;
  };
  ExponentialFit cur = start;
  double cur_sse = sse(cur);
  for (int iter = 0; iter < 100; ++iter) {
    // Normal equations J^T J d = -J^T r for the 2x2 system.
    double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < ages.size(); ++i) {
      const double e = std::exp(cur.b * ages[i]);
      const double da = e;
      const double db = cur.a * ages[i] * e;
      const double r = cur.a * e - lhi[i];
      jaa += da * da;
      jab += da * db;
      jbb += db * db;
      ga += da * r;
      gb += db * r;
    }
    const double det = jaa * jbb - jab * jab;
    if (!(std::abs(det) > 0.0)) break;
    const double step_a = -(jbb * ga - jab * gb) / det;
    const double step_b = -(jaa * gb - jab * ga) / det;
    double scale = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, scale *= 0.5) {
      const ExponentialFit trial{cur.a + scale * step_a, cur.b + scale * step_b};
      if (!(trial.a > 0.0)) continue;
      const double s = sse(trial);
      if (s < cur_sse) {
        cur = trial;
        const double rel = (cur_sse - s) / std::max(cur_sse, 1e-300);
        cur_sse = s;
        improved = rel > 1e-15;
        break;
      }
    }
    if (!improved) break;
  }
  return cur;
}

LhiModel fit_reference_model(std::span<const FitPoint> points, const FitOptions& options) {
  const std::set<int> manual(options.exclude_ids.begin(), options.exclude_ids.end());
  std::vector<FitPoint> kept;
  std::set<int> excluded;
  for (const auto& p : points) {
    if (manual.count(p.escalator_id)) {
      excluded.insert(p.escalator_id);
      continue;
    }
    if (!(p.lhi > 0.0)) {
      throw Error("fit_reference_model: non-positive LHI for escalator " + std::to_string(p.escalator_id) + " in " +
                  p.quarter.to_string());
    }
    kept.push_back(p);
  }
  if (kept.size() < 3 + options.auto_exclude) {
    throw Error("fit_reference_model: at least 3 points must remain after exclusions");
  }

  auto split = [](const std::vector<FitPoint>& pts) {
    std::pair<std::vector<double>, std::vector<double>> ty;
    for (const auto& p : pts) {
      ty.first.push_back(p.age_years);
      ty.second.push_back(p.lhi);
    }
    return ty;
  };

  if (options.auto_exclude > 0) {
    const auto [t, y] = split(kept);
    const ExponentialFit first = fit_exponential(t, y);
    std::vector<std::size_t> order(kept.size());
    std::iota(order.begin(), order.end(), 0);
    auto residual = [&](std::size_t i) {
      return std::abs(std::log(kept[i].lhi) - std::log(first.a) - first.b * kept[i].age_years);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return residual(i) > residual(j); });
    std::vector<bool> drop(kept.size(), false);
    for (std::size_t k = 0; k < options.auto_exclude; ++k) {
      drop[order[k]] = true;
      excluded.insert(kept[order[k]].escalator_id);
    }
    std::vector<FitPoint> rest;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (!drop[i]) rest.push_back(kept[i]);
    }
    kept = std::move(rest);
  }

  const auto [t, y] = split(kept);
  ExponentialFit fit = fit_exponential(t, y);
  if (options.refine) fit = refine_exponential(t, y, fit);

  LhiModel m;
  m.a = fit.a;
  m.b = fit.b;
  m.set_end_of_life(options.t_end_years);
  for (const auto& p : kept) m.fitted_on.emplace_back(p.escalator_id, p.quarter);
  m.excluded.assign(excluded.begin(), excluded.end());
  if (!(m.b > 0.0)) throw Error("fit_reference_model: fitted growth rate b is not positive");
  return m;
}

}  // namespace escalife::health
