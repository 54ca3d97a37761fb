#include "escalife/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "escalife/error.hpp"
#include "escalife/io.hpp"
#include "escalife/pipeline.hpp"
#include "escalife/rul.hpp"
#include "escalife/svg.hpp"

namespace escalife::report {

namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b",
                                               "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79"};

const char* color(std::size_t i) { return kPalette[i % kPalette.size()]; }

svg::Chart chart(std::string title, std::string x_label, std::string y_label, bool dates = false) {
  svg::Chart c;
  c.title = std::move(title);
  c.x_label = std::move(x_label);
  c.y_label = std::move(y_label);
  c.x_is_date = dates;
  return c;
}

svg::Series series(std::string label, std::string color) {
  svg::Series s;
  s.label = std::move(label);
  s.color = std::move(color);
  return s;
}

double day_number(Date d) { return static_cast<double>(d.time_since_epoch().count()); }

std::string no_data(std::string_view what) {
  return fmt::format("<div class=\"no-data\">No data: {}</div>\n", svg::escape(what));
}

std::string sheet_open(Sheet s) {
  return fmt::format("<section class=\"sheet\" id=\"{}\">\n<h2>{}</h2>\n", to_string(s), to_string(s));
}

struct Context {
  const ReportSpec& spec;
  const store::Store& store;
  std::vector<int> ids;
  std::vector<std::string>& warnings;
};

std::string overview_sheet(const Context& cx) {
  std::string body;
  std::string rows;
  for (int id : cx.ids) {
    const auto& meta = cx.store.escalator(id);
    const auto days = cx.store.query_daily(id, cx.spec.from, cx.spec.to);
    const auto at = cx.store.query_at(id, cx.spec.from, cx.spec.to);
    if (days.empty() && at.empty()) continue;
    long corrective = 0;
    long preventive = 0;
    for (const auto& d : days) {
      corrective += d.corrective_events;
      preventive += d.preventive_events;
    }
    const auto alerts = std::count_if(at.begin(), at.end(), [](const auto& r) { return r.status == vibration::AtStatus::Alert; });
    const auto alarms = std::count_if(at.begin(), at.end(), [](const auto& r) { return r.status == vibration::AtStatus::Alarm; });
    rows += fmt::format(
        "<tr data-escalator=\"{}\"><td>{}</td><td>{}</td><td>{}</td><td>{}-{}</td><td>{}</td><td class=\"alerts\">{}</td>"
        "<td class=\"alarms\">{}</td><td>{}</td><td>{}</td></tr>\n",
        id, id, to_string(meta.direction), io::shortest(meta.rise_m), format_clock(meta.service_window.start),
        format_clock(meta.service_window.end), days.size(), alerts, alarms, corrective, preventive);
  }
  if (rows.empty()) {
    cx.warnings.push_back("Overview: no derived data in the period");
    return no_data("no derived data for the selected escalators and period");
  }
  body += "<table class=\"fleet\">\n<tr><th>Escalator</th><th>Direction</th><th>Rise (m)</th><th>Service window</th>"
          "<th>Days</th><th>A_t alerts</th><th>A_t alarms</th><th>Corrective events</th><th>Preventive events</th></tr>\n";
  body += rows;
  body += "</table>\n";
  return body;
}

std::string energy_sheet(const Context& cx) {
  svg::Chart working = chart("Daily working time", "service date", "minutes", true);
  svg::Chart passengers = chart("Daily passenger count", "service date", "passengers", true);
  svg::Chart fixed = chart("Daily fixed loss", "service date", "Wh/min", true);
  std::size_t k = 0;
  for (int id : cx.ids) {
    const auto days = cx.store.query_daily(id, cx.spec.from, cx.spec.to);
    if (days.empty()) continue;
    svg::Series w = series(fmt::format("#{}", id), color(k));
    svg::Series p = series(fmt::format("#{}", id), color(k));
    svg::Series f = series(fmt::format("#{}", id), color(k));
    for (const auto& d : days) {
      const double x = day_number(d.service_date);
      w.points.emplace_back(x, d.working_min);
      p.points.emplace_back(x, d.passengers);
      f.points.emplace_back(x, d.fixed_loss_wh_min);
    }
    working.series.push_back(std::move(w));
    passengers.series.push_back(std::move(p));
    fixed.series.push_back(std::move(f));
    ++k;
  }
  if (k == 0) {
    cx.warnings.push_back("Energy: no daily features in the period");
    return no_data("no daily energy features for the selected escalators and period");
  }
  return svg::render(working) + svg::render(passengers) + svg::render(fixed);
}

std::string vibration_sheet(const Context& cx) {
  const ThresholdTable thresholds = ThresholdTable::defaults();
  std::string body;
  for (int id : cx.ids) {
    const auto at = cx.store.query_at(id, cx.spec.from, cx.spec.to);
    if (at.empty()) continue;
    body += fmt::format("<h3>Escalator {}</h3>\n", id);

    std::array<std::vector<const vibration::AtRecord*>, kSensorCount> per_point;
    for (const auto& r : at) per_point[static_cast<std::size_t>(r.point_id - 1)].push_back(&r);

    for (FreqClass fc : {FreqClass::HighFrequency, FreqClass::LowFrequency}) {
      svg::Chart panel = chart(fmt::format("Escalator {} A_t, {} sensors", id, to_string(fc)), "service date", "A_t (g)", true);
      const ThresholdRow* row = nullptr;
      for (const auto& sp : sensor_layout()) {
        if (sp.freq_class != fc) continue;
        if (!row) row = &thresholds.at(sp.location);
        svg::Series s = series(fmt::format("P{} {}", sp.point_id, to_string(sp.location)), color(sp.point_id - 1));
        s.markers = true;
        for (const auto* r : per_point[static_cast<std::size_t>(sp.point_id - 1)]) {
          const double x = static_cast<double>(r->timestamp.time_since_epoch().count()) / 86400.0;
          s.points.emplace_back(x, r->at_g);
          s.point_class.push_back(fmt::format("pt {}", vibration::to_string(r->status)));
        }
        panel.series.push_back(std::move(s));
      }
      panel.hlines.push_back({row->alert_g, fmt::format("alert {}", svg::number(row->alert_g)), "#ff7f0e"});
      panel.hlines.push_back({row->alarm_g, fmt::format("alarm {}", svg::number(row->alarm_g)), "#d62728"});
      body += svg::render(panel);
    }

    svg::Chart exceed = chart(fmt::format("Escalator {} exceedance curves", id), "A_t threshold (g)", "P(A_t > threshold)");
    std::string table = "<table class=\"points\">\n<tr><th>Point</th><th>Location</th><th>Records</th><th>Alerts</th>"
                        "<th>Alarms</th><th>Exceedance area</th></tr>\n";
    for (const auto& sp : sensor_layout()) {
      const auto& recs = per_point[static_cast<std::size_t>(sp.point_id - 1)];
      if (recs.empty()) continue;
      std::vector<double> values;
      int alerts = 0;
      int alarms = 0;
      for (const auto* r : recs) {
        values.push_back(r->at_g);
        alerts += r->status == vibration::AtStatus::Alert;
        alarms += r->status == vibration::AtStatus::Alarm;
      }
      const auto curve = vibration::exceedance_curve(values);
      const double area = vibration::exceedance_area(values);
      svg::Series s = series(fmt::format("P{}", sp.point_id), color(sp.point_id - 1));
      for (std::size_t i = 0; i < curve.threshold.size(); ++i) {
        s.points.emplace_back(curve.threshold[i], curve.probability[i]);
        if (i + 1 < curve.threshold.size()) s.points.emplace_back(curve.threshold[i + 1], curve.probability[i]);
      }
      exceed.series.push_back(std::move(s));
      table += fmt::format(
          "<tr><td>{}</td><td>{}</td><td>{}</td><td class=\"alerts\">{}</td><td class=\"alarms\">{}</td><td>{}</td></tr>\n",
          sp.point_id, to_string(sp.location), recs.size(), alerts, alarms, io::shortest(area));
    }
    table += "</table>\n";
    body += table;
    body += svg::render(exceed);
  }
  if (body.empty()) {
    cx.warnings.push_back("Vibration: no A_t records in the period");
    return no_data("no A_t records for the selected escalators and period");
  }
  return body;
}

std::string rul_sheet(const Context& cx) {
  std::optional<Quarter> quarter = cx.spec.quarter;
  if (!quarter) {
    for (Quarter q : cx.store.quarters()) {
      if (q.first_day() <= cx.spec.to && q.end_day() > cx.spec.from) quarter = q;
    }
  }
  std::vector<health::QuarterFeatures> features;
  if (quarter) {
    for (const auto& f : cx.store.query_quarter(*quarter)) {
      if (std::find(cx.ids.begin(), cx.ids.end(), f.escalator_id) != cx.ids.end()) features.push_back(f);
    }
  }
  if (features.empty()) {
    cx.warnings.push_back("Rul: no quarter features");
    return no_data("no quarter features for the selected escalators");
  }
  const health::LhiModel model = pipeline::resolve_model(cx.store, cx.spec.model.value_or("default"));
  const auto rows = pipeline::run_rul(features, model);

  std::string body = fmt::format("<p class=\"model\">Quarter {}; reference model a = {}, b = {}, end of life {} years.</p>\n",
                                 quarter->to_string(), io::shortest(model.a), io::shortest(model.b),
                                 io::shortest(model.t_end_years));
  body += "<table class=\"rul\">\n<tr>";
  for (auto h : io::split(io::kRulHeader)) body += fmt::format("<th>{}</th>", h);
  body += "</tr>\n";
  for (const auto& r : rows) {
    body += "<tr>";
    const std::string line = io::format_rul_row(r);
    for (auto cell : io::split(line)) body += fmt::format("<td>{}</td>", cell);
    body += "</tr>\n";
  }
  body += "</table>\n";

  for (const auto& r : rows) {
    const auto& res = r.result;
    const std::string rul_text = io::fixed(res.rul_years, io::kRulDecimals);
    const double span = std::max(model.t_end_years, res.end_age_years);
    std::vector<double> ages;
    for (double t = 0.0; t < span; t += 0.25) ages.push_back(t);
    ages.push_back(span);

    svg::Chart panel = chart(fmt::format("Escalator {} RUL, {}", res.escalator_id, res.quarter.to_string()), "age (years)", "LHI");
    svg::Series ref = series("reference", "#7f7f7f");
    for (double t : ages) {
      if (t <= model.t_end_years) ref.points.emplace_back(t, model.value_at(t));
    }
    ref.dashed = true;
    panel.series.push_back(std::move(ref));

    const auto shifted = rul::shifted_curve(res.lhi_used, res.actual_age, model, ages);
    svg::Series sh = series("shifted", "#1f77b4");
    sh.points = shifted.points;
    if (sh.points.empty() || sh.points.back().first < shifted.truncation_age) {
      sh.points.emplace_back(shifted.truncation_age, model.y_end);
    }
    panel.series.push_back(std::move(sh));

    svg::Series now = series("current", "#d62728");
    now.points.emplace_back(res.actual_age, res.lhi_used);
    now.markers = true;
    now.line = false;
    panel.series.push_back(std::move(now));

    panel.hlines.push_back({model.y_end, "end of life", "#d62728"});
    panel.annotations.push_back({res.actual_age, res.lhi_used, "RUL = " + rul_text + " years"});
    body += fmt::format("<div class=\"rul-panel\" data-escalator=\"{}\" data-rul=\"{}\">\n", res.escalator_id, rul_text);
    body += svg::render(panel);
    body += "</div>\n";
  }
  return body;
}

constexpr std::string_view kStyle = R"(body{font-family:sans-serif;margin:1.5em;color:#222}
nav a{margin-right:1em}
section.sheet{border-top:2px solid #444;margin-top:1.5em}
table{border-collapse:collapse;margin:0.5em 0}
td,th{border:1px solid #bbb;padding:2px 6px;font-size:12px;text-align:right}
.no-data{padding:1em;background:#f4f4f4;color:#666;font-style:italic}
svg.chart{display:block;margin:0.5em 0}
svg text{font-size:10px}
svg .title{font-size:12px;font-weight:bold}
svg .ytick{text-anchor:end}
svg .xtick,svg .xlabel{text-anchor:middle}
svg .annotation{font-size:12px;font-weight:bold}
)";

}  // namespace

std::string_view to_string(Sheet s) {
  switch (s) {
    case Sheet::Overview: return "Overview";
    case Sheet::Energy: return "Energy";
    case Sheet::Vibration: return "Vibration";
    case Sheet::Rul: return "Rul";
  }
  return "?";
}

Sheet parse_sheet(std::string_view text) {
  for (Sheet s : {Sheet::Overview, Sheet::Energy, Sheet::Vibration, Sheet::Rul}) {
    if (to_string(s) == text) return s;
  }
  if (text == "RUL") return Sheet::Rul;
  throw Error("unknown report sheet '" + std::string(text) + "'");
}

void validate(const ReportSpec& spec) {
  if (spec.to < spec.from) throw Error("report period is empty");
  if (spec.sheets.empty()) throw Error("report needs at least one sheet");
}

ReportSpec report_spec_from_json(const nlohmann::json& j) {
  ReportSpec spec;
  try {
    if (j.contains("escalators")) spec.escalators = j.at("escalators").get<std::vector<int>>();
    spec.from = parse_date(j.at("period").at("from").get<std::string>());
    spec.to = parse_date(j.at("period").at("to").get<std::string>());
    if (j.contains("sheets")) {
      spec.sheets.clear();
      for (const auto& s : j.at("sheets")) spec.sheets.push_back(parse_sheet(s.get<std::string>()));
    }
    if (j.contains("model")) spec.model = j.at("model").get<std::string>();
    if (j.contains("quarter")) spec.quarter = Quarter::parse(j.at("quarter").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid report spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

Rendered render_report(const ReportSpec& spec, const store::Store& store) {
  validate(spec);
  Rendered out;
  std::vector<int> ids = spec.escalators;
  if (ids.empty()) {
    for (const auto& m : store.fleet()) ids.push_back(m.id);
  }
  for (int id : ids) store.escalator(id);
  const Context cx{spec, store, ids, out.warnings};

  std::string html = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Escalator condition report</title>\n<style>\n";
  html += kStyle;
  html += "</style>\n</head>\n<body>\n";
  html += fmt::format("<h1>Escalator condition report</h1>\n<p class=\"period\">Period {} to {}</p>\n<nav>",
                      format_date(spec.from), format_date(spec.to));
  for (Sheet s : spec.sheets) html += fmt::format("<a href=\"#{}\">{}</a>", to_string(s), to_string(s));
  html += "</nav>\n";
  for (Sheet s : spec.sheets) {
    html += sheet_open(s);
    switch (s) {
      case Sheet::Overview: html += overview_sheet(cx); break;
      case Sheet::Energy: html += energy_sheet(cx); break;
      case Sheet::Vibration: html += vibration_sheet(cx); break;
      case Sheet::Rul: html += rul_sheet(cx); break;
    }
    html += "</section>\n";
  }
  html += "</body>\n</html>\n";
  out.html = std::move(html);
  return out;
}

}  // namespace escalife::report
