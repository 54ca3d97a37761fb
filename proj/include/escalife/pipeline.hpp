#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "escalife/health.hpp"
#include "escalife/io.hpp"
#include "escalife/store.hpp"
#include "escalife/vibration.hpp"

namespace escalife::pipeline {

inline constexpr std::string_view kBandsModel = "bands";

/// Scores every stored spectrum per frequency class and saves the selection
/// as models/bands.json. A class without spectra keeps its default band.
vibration::BandSelections run_bands(store::Store& store, const vibration::BandSelectionOptions& options = {});

/// models/bands.json, or the default bands when it has not been computed.
vibration::BandSelections load_bands(const store::Store& store);

struct FeatureOptions {
  energy::EventOptions events{};
  health::AggregationOptions aggregation{};
  ThresholdTable thresholds = ThresholdTable::defaults();
};

struct FeatureSummary {
  std::size_t days = 0;
  std::size_t at_records = 0;
  std::vector<Quarter> quarters;
  std::size_t quarter_rows = 0;
  std::vector<std::string> warnings;
};

/// Recomputes daily energy features, reduced A_t records and every quarter up
/// to and including `up_to` for all escalators with energy data.
FeatureSummary run_features(store::Store& store, Quarter up_to, const FeatureOptions& options = {});

/// Fits the reference model to every stored escalator-quarter.
health::LhiModel run_fit(const store::Store& store, const health::FitOptions& options = {});

/// `default` is the built-in reference model; other names resolve to a path
/// (relative paths against the store root) or to models/{name}.json.
health::LhiModel resolve_model(const store::Store& store, std::string_view spec);
std::filesystem::path resolve_output(const store::Store& store, const std::filesystem::path& out);

std::vector<io::RulRow> run_rul(const std::vector<health::QuarterFeatures>& features, const health::LhiModel& model);
std::string rul_csv(const std::vector<io::RulRow>& rows);

/// Reads a quarter features CSV (the quarters partition schema).
std::vector<health::QuarterFeatures> read_quarter_csv(const std::filesystem::path& p);

}  // namespace escalife::pipeline
