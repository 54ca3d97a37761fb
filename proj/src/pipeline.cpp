#include "escalife/pipeline.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "escalife/error.hpp"
#include "escalife/rul.hpp"

namespace escalife::pipeline {

namespace fs = std::filesystem;

vibration::BandSelections run_bands(store::Store& st, const vibration::BandSelectionOptions& options) {
  vibration::BandScorer high(FreqClass::HighFrequency, options);
  vibration::BandScorer low(FreqClass::LowFrequency, options);
  for (const auto& meta : st.fleet()) {
    for (Date d : st.vibration_dates(meta.id)) {
      for (const auto& spec : st.query_spectra(meta.id, d, d)) {
        (sensor_point(spec.point_id).freq_class == FreqClass::HighFrequency ? high : low).add(spec);
      }
    }
  }
  vibration::BandSelections out;
  if (high.count() > 0) out.high = high.finish();
  if (low.count() > 0) out.low = low.finish();
  st.write_model(kBandsModel, vibration::to_json(out));
  return out;
}

vibration::BandSelections load_bands(const store::Store& st) {
  if (auto j = st.read_model(kBandsModel)) return vibration::band_selections_from_json(*j);
  return {};
}

FeatureSummary run_features(store::Store& st, Quarter up_to, const FeatureOptions& options) {
  FeatureSummary summary;
  const LocalClock clock = st.clock();
  const vibration::BandSelections bands = load_bands(st);
  const Date last_day = up_to.end_day() - std::chrono::days{1};
  std::map<Quarter, std::vector<health::QuarterFeatures>> by_quarter;
  std::optional<Quarter> first_quarter;

  // Copied: store writes reload the fleet.
  const std::vector<EscalatorMeta> fleet = st.fleet();
  for (const auto& meta : fleet) {
    std::vector<Date> dates = st.energy_dates(meta.id);
    std::erase_if(dates, [&](Date d) { return d > last_day; });
    if (dates.empty()) continue;

    std::vector<energy::DailyFeatures> days;
    for (Date d : dates) {
      const auto minutes = st.query_energy(meta.id, d, d);
      for (const auto& profile : energy::regroup_service_days(minutes, clock)) {
        days.push_back(energy::process_day(profile, meta, clock, options.events));
      }
    }

    std::vector<vibration::AtRecord> at;
    for (Date d : st.vibration_dates(meta.id)) {
      if (d > last_day) continue;
      std::vector<vibration::AtRecord> raw;
      for (const auto& spec : st.query_spectra(meta.id, d, d)) {
        raw.push_back(vibration::compute_at(spec, bands.for_class(sensor_point(spec.point_id).freq_class),
                                            options.thresholds));
      }
      auto reduced = vibration::reduce_daily(raw, meta.service_window, clock);
      at.insert(at.end(), reduced.begin(), reduced.end());
    }

    st.write_daily(meta.id, days);
    st.write_at(meta.id, at);
    summary.days += days.size();
    summary.at_records += at.size();

    const Quarter start = Quarter::of(dates.front());
    if (!first_quarter || start < *first_quarter) first_quarter = start;

    auto days_in = [&](Quarter q) {
      std::vector<energy::DailyFeatures> out;
      for (const auto& d : days) {
        if (q.contains(d.service_date)) out.push_back(d);
      }
      return out;
    };

    double baseline = 0.0;
    try {
      baseline = health::baseline_fixed_loss(days_in(start), meta.service_window);
    } catch (const Error& e) {
      summary.warnings.push_back(fmt::format("escalator {}: {}", meta.id, e.what()));
      continue;
    }

    std::optional<health::CumulativeTotals> prior;
    for (Quarter q = start; q <= up_to; q = q.next()) {
      const auto q_days = days_in(q);
      if (q_days.empty()) continue;
      std::vector<vibration::AtRecord> q_at;
      for (const auto& r : at) {
        if (q.contains(clock.service_date(r.timestamp))) q_at.push_back(r);
      }
      try {
        const auto agg = health::aggregate_quarter(meta, q, st.age_reference(), q_days, q_at, prior, baseline,
                                                   options.aggregation);
        by_quarter[q].push_back(agg.features);
        prior = agg.cumulative;
      } catch (const Error& e) {
        summary.warnings.push_back(fmt::format("escalator {} {}: {}", meta.id, q.to_string(), e.what()));
      }
    }
  }

  if (first_quarter) {
    for (Quarter q = *first_quarter; q <= up_to; q = q.next()) {
      auto& rows = by_quarter[q];
      st.write_quarter(q, rows);
      summary.quarters.push_back(q);
      summary.quarter_rows += rows.size();
    }
  } else {
    summary.warnings.push_back("no energy data up to " + up_to.to_string());
  }
  return summary;
}

health::LhiModel run_fit(const store::Store& st, const health::FitOptions& options) {
  std::vector<health::FitPoint> points;
  for (Quarter q : st.quarters()) {
    for (const auto& f : st.query_quarter(q)) points.push_back({f.escalator_id, f.quarter, f.age_years, f.lhi});
  }
  if (points.empty()) throw Error("no quarter features in the store; run `features` first");
  return health::fit_reference_model(points, options);
}

fs::path resolve_output(const store::Store& st, const fs::path& out) {
  return out.is_absolute() ? out : st.root() / out;
}

health::LhiModel resolve_model(const store::Store& st, std::string_view spec) {
  if (spec == "default") return health::LhiModel::reference();
  fs::path p = resolve_output(st, fs::path(spec));
  if (!fs::exists(p)) {
    const fs::path named = st.root() / "models" / (std::string(spec) + ".json");
    if (!fs::exists(named)) throw Error("model '" + std::string(spec) + "' not found");
    p = named;
  }
  try {
    auto model = health::lhi_model_from_json(nlohmann::json::parse(io::read_file(p)));
    health::validate(model);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid model file " + p.string() + ": " + e.what());
  }
}

std::vector<io::RulRow> run_rul(const std::vector<health::QuarterFeatures>& features, const health::LhiModel& model) {
  std::vector<io::RulRow> rows;
  for (const auto& f : features) {
    io::RulRow row;
    row.features = f;
    row.result = rul::remaining_useful_life(f.lhi, f.age_years, model);
    row.result.escalator_id = f.escalator_id;
    row.result.quarter = f.quarter;
    row.t_end_years = model.t_end_years;
    rows.push_back(row);
  }
  return rows;
}

std::string rul_csv(const std::vector<io::RulRow>& rows) {
  std::string out(io::kRulHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += io::format_rul_row(r);
    out += '\n';
  }
  return out;
}

std::vector<health::QuarterFeatures> read_quarter_csv(const fs::path& p) {
  return io::parse_table<health::QuarterFeatures>(io::read_file(p), io::kQuarterHeader, io::parse_quarter_row);
}

}  // namespace escalife::pipeline
