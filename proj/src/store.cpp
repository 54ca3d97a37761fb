#include "escalife/store.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fcntl.h>
#include <set>
#include <signal.h>
#include <unistd.h>

#include <fmt/format.h>

#include "escalife/error.hpp"
#include "escalife/io.hpp"

namespace escalife::store {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kFleetFile = "fleet.json";
constexpr const char* kLockFile = ".lock";

std::string now_utc() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    return format_timestamp(Timestamp{std::chrono::seconds{io::parse_long(epoch)}});
  }
  return format_timestamp(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string energy_rel(int esc, Date d) { return fmt::format("raw_energy/{}/{}.csv", esc, format_date(d)); }
std::string vibration_rel(int esc, int point, Date d) {
  return fmt::format("raw_vibration/{}/{}/{}.jsonl", esc, point, format_date(d));
}
std::string daily_rel(int esc) { return fmt::format("derived_daily/{}.csv", esc); }
std::string at_rel(int esc) { return fmt::format("derived_at/{}.csv", esc); }
std::string quarter_rel(Quarter q) { return "quarters/" + q.to_string() + ".csv"; }

bool is_csv(const fs::path& p) { return p.extension() == ".csv"; }

std::size_t count_rows(std::string_view content, bool has_header) {
  std::size_t n = 0;
  for (auto l : io::lines(content)) {
    if (!io::trim(l).empty()) ++n;
  }
  return has_header && n > 0 ? n - 1 : n;
}

/// Data lines of a partition file, header dropped.
std::vector<std::string> data_lines(const fs::path& p, bool has_header) {
  std::vector<std::string> out;
  if (!fs::exists(p)) return out;
  const std::string content = io::read_file(p);
  bool first = has_header;
  for (auto l : io::lines(content)) {
    if (first) {
      first = false;
      continue;
    }
    if (!io::trim(l).empty()) out.emplace_back(l);
  }
  return out;
}

std::vector<Date> dates_in(const fs::path& dir, std::string_view ext) {
  std::vector<Date> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ext) continue;
    try {
      out.push_back(parse_date(e.path().stem().string()));
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> files_under(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_range(Date from, Date to) {
  if (to < from) throw Error("empty date range: " + format_date(from) + " > " + format_date(to));
}

// A validated row waiting to be merged into its partition.
struct Pending {
  std::string row;
  std::string file;
  std::size_t line = 0;
};

using PartitionRows = std::map<std::string, std::map<Timestamp, Pending>>;

}  // namespace

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::RawEnergy: return "raw_energy";
    case Partition::RawVibration: return "raw_vibration";
    case Partition::DerivedDaily: return "derived_daily";
    case Partition::DerivedAt: return "derived_at";
    case Partition::Quarters: return "quarters";
    case Partition::Models: return "models";
  }
  return "?";
}

Partition parse_partition(std::string_view text) {
  for (auto p : {Partition::RawEnergy, Partition::RawVibration, Partition::DerivedDaily, Partition::DerivedAt,
                 Partition::Quarters, Partition::Models}) {
    if (to_string(p) == text) return p;
  }
  throw Error("unknown partition '" + std::string(text) + "'");
}

nlohmann::json to_json(const Manifest& m) {
  nlohmann::json ingestions = nlohmann::json::array();
  for (const auto& e : m.ingestions) {
    ingestions.push_back({{"source", e.source}, {"files", e.files}, {"rows", e.rows}, {"rejected", e.rejected}});
  }
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [k, v] : m.row_counts) counts[k] = v;
  return nlohmann::json{{"schema_version", m.schema_version},
                        {"created_utc", m.created_utc},
                        {"utc_offset_minutes", m.utc_offset_minutes},
                        {"age_reference_date", format_date(m.age_reference)},
                        {"ingestions", ingestions},
                        {"row_counts", counts}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
  try {
    Manifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.created_utc = j.at("created_utc").get<std::string>();
    m.utc_offset_minutes = j.value("utc_offset_minutes", m.utc_offset_minutes);
    if (j.contains("age_reference_date")) m.age_reference = parse_date(j.at("age_reference_date").get<std::string>());
    for (const auto& e : j.at("ingestions")) {
      m.ingestions.push_back({e.at("source").get<std::string>(), e.at("files").get<std::size_t>(),
                              e.at("rows").get<std::size_t>(), e.at("rejected").get<std::size_t>()});
    }
    if (j.contains("row_counts")) {
      for (const auto& [k, v] : j.at("row_counts").items()) m.row_counts[k] = v.get<std::size_t>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid manifest: ") + e.what());
  }
}

WriteLock::WriteLock(const fs::path& root) : path_(root / kLockFile) {
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      return;
    }
    if (errno != EEXIST) throw Error("cannot create lock file " + path_.string());
    // A lock left behind by a dead process is taken over.
    long holder = 0;
    try {
      holder = io::parse_long(io::read_file(path_));
    } catch (const Error&) {
    }
    if (holder > 0 && ::kill(static_cast<pid_t>(holder), 0) != 0 && errno == ESRCH) {
      fs::remove(path_);
      continue;
    }
    break;
  }
  throw Error("store is locked by another writer (" + path_.string() + ")");
}

WriteLock::~WriteLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

Store Store::open_or_create(const fs::path& root) {
  if (fs::exists(root / kManifestFile)) return open(root);
  fs::create_directories(root);
  Store s(root);
  WriteLock lock(root);
  s.manifest_.created_utc = now_utc();
  s.save_manifest();
  s.fleet_ = default_fleet();
  return s;
}

Store Store::open(const fs::path& root) {
  if (!fs::exists(root / kManifestFile)) throw Error("no store at " + root.string() + " (manifest.json missing)");
  Store s(root);
  s.load();
  return s;
}

void Store::load() {
  manifest_ = manifest_from_json(nlohmann::json::parse(io::read_file(root_ / kManifestFile), nullptr, true));
  if (manifest_.schema_version != kSchemaVersion) {
    throw Error(fmt::format("store schema version {} is not supported (expected {})", manifest_.schema_version,
                            kSchemaVersion));
  }
  fleet_ = fs::exists(root_ / kFleetFile)
               ? fleet_from_json(nlohmann::json::parse(io::read_file(root_ / kFleetFile)))
               : default_fleet();
}

void Store::save_manifest() { io::write_file_atomic(root_ / kManifestFile, to_json(manifest_).dump(2) + "\n"); }

const EscalatorMeta& Store::escalator(int id) const { return find_escalator(fleet_, id); }

void Store::write_partition(const std::string& rel, std::string_view header, const std::vector<std::string>& rows) {
  std::string content;
  if (!header.empty()) {
    content += header;
    content += '\n';
  }
  for (const auto& r : rows) {
    content += r;
    content += '\n';
  }
  io::write_file_atomic(root_ / rel, content);
  manifest_.row_counts[rel] = rows.size();
}

IngestReport Store::ingest(const fs::path& raw_dir) {
  if (!fs::is_directory(raw_dir)) throw Error("raw directory " + raw_dir.string() + " does not exist");
  WriteLock lock(root_);
  load();
  IngestReport report;
  bool config_changed = false;
  const bool has_raw_data = std::any_of(manifest_.row_counts.begin(), manifest_.row_counts.end(), [](const auto& kv) {
    return kv.first.rfind("raw_", 0) == 0 && kv.second > 0;
  });

  if (fs::exists(raw_dir / "site.json")) {
    try {
      const auto site = nlohmann::json::parse(io::read_file(raw_dir / "site.json"));
      const int offset = site.value("utc_offset_minutes", manifest_.utc_offset_minutes);
      const Date ref = site.contains("age_reference_date")
                           ? parse_date(site.at("age_reference_date").get<std::string>())
                           : manifest_.age_reference;
      if (offset != manifest_.utc_offset_minutes || ref != manifest_.age_reference) {
        if (has_raw_data) throw Error("site settings differ from the store's and data has already been ingested");
        manifest_.utc_offset_minutes = offset;
        manifest_.age_reference = ref;
        config_changed = true;
      }
    } catch (const std::exception& e) {
      report.rejected_files.push_back({(raw_dir / "site.json").string(), 0, e.what()});
    }
  }

  if (fs::exists(raw_dir / kFleetFile)) {
    try {
      const auto incoming = fleet_from_json(nlohmann::json::parse(io::read_file(raw_dir / kFleetFile)));
      std::vector<EscalatorMeta> merged = fs::exists(root_ / kFleetFile) ? fleet_ : std::vector<EscalatorMeta>{};
      for (const auto& m : incoming) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const EscalatorMeta& e) { return e.id == m.id; });
        if (it == merged.end()) {
          merged.push_back(m);
        } else if (nlohmann::json(*it) != nlohmann::json(m)) {
          throw Error(fmt::format("escalator {} conflicts with the stored fleet", m.id));
        }
      }
      std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
      if (!fs::exists(root_ / kFleetFile) || merged.size() != fleet_.size()) {
        io::write_file_atomic(root_ / kFleetFile, fleet_to_json(merged).dump(2) + "\n");
        fleet_ = merged;
        config_changed = true;
      }
    } catch (const std::exception& e) {
      report.rejected_files.push_back({(raw_dir / kFleetFile).string(), 0, e.what()});
    }
  }

  const LocalClock clk = clock();
  auto known = [&](int id) {
    return std::any_of(fleet_.begin(), fleet_.end(), [id](const EscalatorMeta& m) { return m.id == id; });
  };
  auto reject_row = [&](const std::string& file, std::size_t line, std::string reason) {
    ++report.rejected;
    report.rejected_rows.push_back({file, line, std::move(reason)});
  };

  // Validated rows from every accepted file, keyed by partition path.
  PartitionRows pending;
  auto stage = [&](PartitionRows& file_rows) {
    for (auto& [rel, rows] : file_rows) {
      auto& dst = pending[rel];
      for (auto& [ts, p] : rows) {
        auto [it, inserted] = dst.emplace(ts, p);
        if (inserted) continue;
        if (it->second.row == p.row) {
          ++report.already_present;
        } else {
          reject_row(p.file, p.line, "duplicate escalator-minute with different values");
        }
      }
    }
  };

  for (const auto& path : files_under(raw_dir / "energy", ".csv")) {
    ++report.files;
    const std::string name = path.string();
    const std::string content = io::read_file(path);
    const auto ls = io::lines(content);
    if (ls.empty() || (io::trim(ls[0]) != io::kEnergyHeader && io::trim(ls[0]) != io::kEnergyHeaderFull)) {
      report.rejected_files.push_back({name, 1, "unexpected energy header"});
      continue;
    }
    PartitionRows file_rows;
    std::map<int, Timestamp> last;
    bool file_ok = true;
    for (std::size_t i = 1; i < ls.size() && file_ok; ++i) {
      if (io::trim(ls[i]).empty()) continue;
      const std::size_t line_no = i + 1;
      energy::EnergyMinute m;
      try {
        m = io::parse_energy_row(ls[i]);
      } catch (const Error& e) {
        reject_row(name, line_no, e.what());
        continue;
      }
      if (!known(m.escalator_id)) {
        reject_row(name, line_no, fmt::format("unknown escalator {}", m.escalator_id));
        continue;
      }
      if (!(m.e_imp_wh >= 0.0) || !(m.e_exp_wh >= 0.0) || std::isinf(m.e_imp_wh) || std::isinf(m.e_exp_wh)) {
        reject_row(name, line_no, "energy values must be finite and non-negative");
        continue;
      }
      if (m.timestamp.time_since_epoch().count() % 60 != 0) {
        reject_row(name, line_no, "timestamp is not on a minute boundary");
        continue;
      }
      if (auto it = last.find(m.escalator_id); it != last.end()) {
        if (m.timestamp < it->second) {
          report.rejected_files.push_back({name, line_no, "timestamps are not monotone"});
          file_ok = false;
          break;
        }
        if (m.timestamp == it->second) {
          reject_row(name, line_no, "duplicate escalator-minute");
          continue;
        }
      }
      last[m.escalator_id] = m.timestamp;
      file_rows[energy_rel(m.escalator_id, clk.service_date(m.timestamp))].emplace(
          m.timestamp, Pending{io::format_energy_row(m, true), name, line_no});
    }
    if (file_ok) stage(file_rows);
  }

  for (const auto& path : files_under(raw_dir / "vibration", ".jsonl")) {
    ++report.files;
    const std::string name = path.string();
    const std::string content = io::read_file(path);
    const auto ls = io::lines(content);
    PartitionRows file_rows;
    std::map<std::pair<int, int>, Timestamp> last;
    bool file_ok = true;
    for (std::size_t i = 0; i < ls.size() && file_ok; ++i) {
      if (io::trim(ls[i]).empty()) continue;
      const std::size_t line_no = i + 1;
      vibration::SpectrumRecord s;
      try {
        s = io::parse_spectrum_jsonl(ls[i]);
        vibration::validate(s);
        sensor_point(s.point_id);
      } catch (const Error& e) {
        reject_row(name, line_no, e.what());
        continue;
      }
      if (!known(s.escalator_id)) {
        reject_row(name, line_no, fmt::format("unknown escalator {}", s.escalator_id));
        continue;
      }
      const auto key = std::make_pair(s.escalator_id, s.point_id);
      if (auto it = last.find(key); it != last.end()) {
        if (s.timestamp < it->second) {
          report.rejected_files.push_back({name, line_no, "timestamps are not monotone"});
          file_ok = false;
          break;
        }
        if (s.timestamp == it->second) {
          reject_row(name, line_no, "duplicate spectrum for escalator, point and time");
          continue;
        }
      }
      last[key] = s.timestamp;
      file_rows[vibration_rel(s.escalator_id, s.point_id, clk.service_date(s.timestamp))].emplace(
          s.timestamp, Pending{io::format_spectrum_jsonl(s), name, line_no});
    }
    if (file_ok) stage(file_rows);
  }

  for (auto& [rel, rows] : pending) {
    const bool energy = rel.rfind("raw_energy/", 0) == 0;
    std::map<Timestamp, std::string> stored;
    for (auto& line : data_lines(root_ / rel, energy)) {
      const Timestamp ts = energy ? io::parse_energy_row(line).timestamp : io::parse_spectrum_jsonl(line).timestamp;
      stored.emplace(ts, std::move(line));
    }
    std::size_t added = 0;
    for (auto& [ts, p] : rows) {
      auto [it, inserted] = stored.emplace(ts, p.row);
      if (inserted) {
        ++added;
      } else if (it->second == p.row) {
        ++report.already_present;
      } else {
        reject_row(p.file, p.line, "duplicate escalator-minute conflicts with a stored row");
      }
    }
    if (added == 0) continue;
    std::vector<std::string> out;
    out.reserve(stored.size());
    for (auto& [ts, row] : stored) out.push_back(std::move(row));
    write_partition(rel, energy ? io::kEnergyHeaderFull : std::string_view{}, out);
    report.rows += added;
  }

  if (report.rows > 0 || config_changed) {
    if (report.rows > 0 || report.rejected > 0) {
      manifest_.ingestions.push_back(
          {raw_dir.string(), report.files, report.rows, report.rejected + report.rejected_files.size()});
    }
    save_manifest();
  }
  return report;
}

std::vector<Date> Store::energy_dates(int escalator_id) const {
  escalator(escalator_id);
  return dates_in(root_ / "raw_energy" / std::to_string(escalator_id), ".csv");
}

std::vector<Date> Store::vibration_dates(int escalator_id) const {
  escalator(escalator_id);
  std::set<Date> all;
  for (int p = 1; p <= kSensorCount; ++p) {
    for (Date d : dates_in(root_ / "raw_vibration" / std::to_string(escalator_id) / std::to_string(p), ".jsonl")) {
      all.insert(d);
    }
  }
  return {all.begin(), all.end()};
}

std::vector<std::string> Store::query(Partition p, int escalator_id, Date from, Date to) const {
  check_range(from, to);
  escalator(escalator_id);
  std::vector<std::string> out;
  auto in_range = [&](Date d) { return d >= from && d <= to; };
  auto append = [&](std::vector<std::string>&& v) {
    for (auto& s : v) out.push_back(std::move(s));
  };
  const LocalClock clk = clock();

  switch (p) {
    case Partition::RawEnergy:
      for (Date d : energy_dates(escalator_id)) {
        if (in_range(d)) append(data_lines(root_ / energy_rel(escalator_id, d), true));
      }
      break;
    case Partition::RawVibration:
      for (Date d : vibration_dates(escalator_id)) {
        if (!in_range(d)) continue;
        for (int pt = 1; pt <= kSensorCount; ++pt) append(data_lines(root_ / vibration_rel(escalator_id, pt, d), false));
      }
      break;
    case Partition::DerivedDaily:
      for (auto& l : data_lines(root_ / daily_rel(escalator_id), true)) {
        if (in_range(io::parse_daily_row(l).service_date)) out.push_back(std::move(l));
      }
      break;
    case Partition::DerivedAt:
      for (auto& l : data_lines(root_ / at_rel(escalator_id), true)) {
        if (in_range(clk.service_date(io::parse_at_row(l).timestamp))) out.push_back(std::move(l));
      }
      break;
    case Partition::Quarters:
      for (Quarter q : quarters()) {
        if (q.end_day() <= from || q.first_day() > to) continue;
        for (auto& l : data_lines(root_ / quarter_rel(q), true)) {
          if (io::parse_quarter_row(l).escalator_id == escalator_id) out.push_back(std::move(l));
        }
      }
      break;
    case Partition::Models:
      throw Error("the models partition holds documents, not records");
  }
  return out;
}

std::vector<energy::EnergyMinute> Store::query_energy(int escalator_id, Date from, Date to) const {
  std::vector<energy::EnergyMinute> out;
  for (const auto& l : query(Partition::RawEnergy, escalator_id, from, to)) out.push_back(io::parse_energy_row(l));
  return out;
}

std::vector<vibration::SpectrumRecord> Store::query_spectra(int escalator_id, Date from, Date to, int point_id) const {
  check_range(from, to);
  escalator(escalator_id);
  if (point_id != 0) sensor_point(point_id);
  std::vector<vibration::SpectrumRecord> out;
  for (Date d : vibration_dates(escalator_id)) {
    if (d < from || d > to) continue;
    for (int pt = 1; pt <= kSensorCount; ++pt) {
      if (point_id != 0 && pt != point_id) continue;
      for (const auto& l : data_lines(root_ / vibration_rel(escalator_id, pt, d), false)) {
        out.push_back(io::parse_spectrum_jsonl(l));
      }
    }
  }
  return out;
}

std::vector<energy::DailyFeatures> Store::query_daily(int escalator_id, Date from, Date to) const {
  std::vector<energy::DailyFeatures> out;
  for (const auto& l : query(Partition::DerivedDaily, escalator_id, from, to)) out.push_back(io::parse_daily_row(l));
  return out;
}

std::vector<vibration::AtRecord> Store::query_at(int escalator_id, Date from, Date to) const {
  std::vector<vibration::AtRecord> out;
  for (const auto& l : query(Partition::DerivedAt, escalator_id, from, to)) out.push_back(io::parse_at_row(l));
  return out;
}

std::vector<health::QuarterFeatures> Store::query_quarter(Quarter q) const {
  std::vector<health::QuarterFeatures> out;
  for (const auto& l : data_lines(root_ / quarter_rel(q), true)) out.push_back(io::parse_quarter_row(l));
  return out;
}

std::vector<Quarter> Store::quarters() const {
  std::vector<Quarter> out;
  const fs::path dir = root_ / "quarters";
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || !is_csv(e.path())) continue;
    try {
      out.push_back(Quarter::parse(e.path().stem().string()));
    } catch (const Error&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Store::write_daily(int escalator_id, const std::vector<energy::DailyFeatures>& days) {
  escalator(escalator_id);
  WriteLock lock(root_);
  load();
  std::vector<std::string> rows;
  for (const auto& d : days) rows.push_back(io::format_daily_row(d));
  write_partition(daily_rel(escalator_id), io::kDailyHeader, rows);
  save_manifest();
}

void Store::write_at(int escalator_id, const std::vector<vibration::AtRecord>& records) {
  escalator(escalator_id);
  WriteLock lock(root_);
  load();
  std::vector<std::string> rows;
  for (const auto& r : records) rows.push_back(io::format_at_row(r));
  write_partition(at_rel(escalator_id), io::kAtHeader, rows);
  save_manifest();
}

void Store::write_quarter(Quarter q, const std::vector<health::QuarterFeatures>& features) {
  WriteLock lock(root_);
  load();
  std::vector<std::string> rows;
  for (const auto& f : features) rows.push_back(io::format_quarter_row(f));
  write_partition(quarter_rel(q), io::kQuarterHeader, rows);
  save_manifest();
}

void Store::write_model(std::string_view name, const nlohmann::json& model) {
  if (name.empty() || name.find('/') != std::string_view::npos) throw Error("invalid model name");
  WriteLock lock(root_);
  io::write_file_atomic(root_ / "models" / (std::string(name) + ".json"), model.dump(2) + "\n");
}

std::optional<nlohmann::json> Store::read_model(std::string_view name) const {
  const fs::path p = root_ / "models" / (std::string(name) + ".json");
  if (!fs::exists(p)) return std::nullopt;
  try {
    return nlohmann::json::parse(io::read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid model file " + p.string() + ": " + e.what());
  }
}

VerifyReport Store::verify() const {
  VerifyReport report;
  Manifest m;
  try {
    m = manifest_from_json(nlohmann::json::parse(io::read_file(root_ / kManifestFile)));
  } catch (const std::exception& e) {
    report.problems.push_back(std::string("manifest unreadable: ") + e.what());
    return report;
  }
  if (m.schema_version != kSchemaVersion) {
    report.problems.push_back(fmt::format("schema version {} != supported {}", m.schema_version, kSchemaVersion));
  }
  std::set<std::string> seen;
  for (const char* dir : {"raw_energy", "raw_vibration", "derived_daily", "derived_at", "quarters"}) {
    if (!fs::is_directory(root_ / dir)) continue;
    for (const auto& e : fs::recursive_directory_iterator(root_ / dir)) {
      if (!e.is_regular_file()) continue;
      const std::string rel = fs::relative(e.path(), root_).generic_string();
      if (rel.find(".tmp.") != std::string::npos) {
        report.problems.push_back(rel + ": leftover temporary file");
        continue;
      }
      ++report.files_checked;
      seen.insert(rel);
      const std::size_t rows = count_rows(io::read_file(e.path()), is_csv(e.path()));
      auto it = m.row_counts.find(rel);
      if (it == m.row_counts.end()) {
        report.problems.push_back(rel + ": not recorded in manifest");
      } else if (it->second != rows) {
        report.problems.push_back(fmt::format("{}: manifest says {} rows, file has {}", rel, it->second, rows));
      }
    }
  }
  for (const auto& [rel, n] : m.row_counts) {
    if (!seen.count(rel)) report.problems.push_back(rel + ": in manifest but missing on disk");
  }
  return report;
}

}  // namespace escalife::store
