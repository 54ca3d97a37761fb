#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/domain.hpp"
#include "escalife/energy.hpp"
#include "escalife/health.hpp"
#include "escalife/time.hpp"
#include "escalife/vibration.hpp"

namespace escalife::store {

inline constexpr int kSchemaVersion = 1;

enum class Partition { RawEnergy, RawVibration, DerivedDaily, DerivedAt, Quarters, Models };

std::string_view to_string(Partition p);
Partition parse_partition(std::string_view text);

struct IngestionEntry {
  std::string source;
  std::size_t files = 0;
  std::size_t rows = 0;
  std::size_t rejected = 0;
};

struct Manifest {
  int schema_version = kSchemaVersion;
  std::string created_utc;
  int utc_offset_minutes = 8 * 60;
  Date age_reference = default_age_reference_date();
  std::vector<IngestionEntry> ingestions;
  /// Data rows per partition file, keyed by path relative to the store root.
  std::map<std::string, std::size_t> row_counts;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

struct RejectedRow {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct IngestReport {
  std::size_t files = 0;
  /// New rows written.
  std::size_t rows = 0;
  /// Rows identical to ones already stored.
  std::size_t already_present = 0;
  std::size_t rejected = 0;
  std::vector<RejectedRow> rejected_rows;
  /// Whole files rejected for schema violations.
  std::vector<RejectedRow> rejected_files;

  bool ok() const { return rejected == 0 && rejected_files.empty(); }
};

struct VerifyReport {
  std::size_t files_checked = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

/// Held for the lifetime of a write; creation fails if another writer holds
/// the store.
class WriteLock {
 public:
  explicit WriteLock(const std::filesystem::path& root);
  ~WriteLock();
  WriteLock(const WriteLock&) = delete;
  WriteLock& operator=(const WriteLock&) = delete;

 private:
  std::filesystem::path path_;
};

class Store {
 public:
  /// Opens an existing store, or initialises an empty one at `root`.
  static Store open_or_create(const std::filesystem::path& root);
  /// Opens an existing store; throws if there is no manifest.
  static Store open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  const Manifest& manifest() const { return manifest_; }
  LocalClock clock() const { return LocalClock{std::chrono::minutes{manifest_.utc_offset_minutes}}; }
  Date age_reference() const { return manifest_.age_reference; }

  /// The stored fleet, or the bundled one if none has been ingested.
  const std::vector<EscalatorMeta>& fleet() const { return fleet_; }
  const EscalatorMeta& escalator(int id) const;

  /// Reads `fleet.json`, `site.json`, `energy/**.csv` and
  /// `vibration/**.jsonl` under `raw_dir`.
  IngestReport ingest(const std::filesystem::path& raw_dir);

  /// Raw CSV/JSONL lines of one partition for service dates in [from, to],
  /// ordered by date then record. Derived partitions ignore the range bounds
  /// they do not carry.
  std::vector<std::string> query(Partition p, int escalator_id, Date from, Date to) const;

  std::vector<energy::EnergyMinute> query_energy(int escalator_id, Date from, Date to) const;
  /// One service day at a time; `point_id` 0 means all points.
  std::vector<vibration::SpectrumRecord> query_spectra(int escalator_id, Date from, Date to, int point_id = 0) const;
  std::vector<energy::DailyFeatures> query_daily(int escalator_id, Date from, Date to) const;
  /// A_t records whose service date lies in [from, to].
  std::vector<vibration::AtRecord> query_at(int escalator_id, Date from, Date to) const;
  /// Empty when the quarter has not been computed.
  std::vector<health::QuarterFeatures> query_quarter(Quarter q) const;
  std::vector<Quarter> quarters() const;

  /// Service dates with raw energy (or vibration) data for an escalator.
  std::vector<Date> energy_dates(int escalator_id) const;
  std::vector<Date> vibration_dates(int escalator_id) const;

  void write_daily(int escalator_id, const std::vector<energy::DailyFeatures>& days);
  void write_at(int escalator_id, const std::vector<vibration::AtRecord>& records);
  void write_quarter(Quarter q, const std::vector<health::QuarterFeatures>& rows);
  void write_model(std::string_view name, const nlohmann::json& model);
  std::optional<nlohmann::json> read_model(std::string_view name) const;

  /// Recounts every partition file against the manifest.
  VerifyReport verify() const;

 private:
  explicit Store(std::filesystem::path root) : root_(std::move(root)) {}

  void load();
  void save_manifest();
  void write_partition(const std::string& rel, std::string_view header, const std::vector<std::string>& rows);

  std::filesystem::path root_;
  Manifest manifest_;
  std::vector<EscalatorMeta> fleet_;
};

}  // namespace escalife::store
