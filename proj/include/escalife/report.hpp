#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/store.hpp"

namespace escalife::report {

enum class Sheet { Overview, Energy, Vibration, Rul };

std::string_view to_string(Sheet s);
Sheet parse_sheet(std::string_view text);

struct ReportSpec {
  /// Empty selects the whole fleet.
  std::vector<int> escalators;
  Date from{};
  Date to{};  // inclusive
  std::vector<Sheet> sheets{Sheet::Overview, Sheet::Energy, Sheet::Vibration, Sheet::Rul};
  /// Model for the RUL sheet; `default` when absent.
  std::optional<std::string> model;
  /// Quarter for the RUL sheet; the latest stored quarter overlapping the
  /// period when absent.
  std::optional<Quarter> quarter;
};

void validate(const ReportSpec& spec);
ReportSpec report_spec_from_json(const nlohmann::json& j);

struct Rendered {
  std::string html;
  std::vector<std::string> warnings;
};

/// Self-contained HTML with inline SVG. Pure function of the store contents
/// and the spec.
Rendered render_report(const ReportSpec& spec, const store::Store& store);

}  // namespace escalife::report
