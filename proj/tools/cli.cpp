#include "cli.hpp"

#include <filesystem>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "escalife/error.hpp"
#include "escalife/io.hpp"
#include "escalife/pipeline.hpp"
#include "escalife/report.hpp"
#include "escalife/store.hpp"
#include "escalife/synth.hpp"

namespace escalife::cli {

namespace fs = std::filesystem;

namespace {

std::string check_quarter(const std::string& text) {
  try {
    Quarter::parse(text);
    return {};
  } catch (const Error& e) {
    return e.what();
  }
}

std::vector<int> parse_ids(const std::string& text) {
  std::vector<int> ids;
  for (auto part : io::split(text)) {
    if (!io::trim(part).empty()) ids.push_back(io::parse_int(part));
  }
  return ids;
}

nlohmann::json read_json(const fs::path& p) {
  try {
    return nlohmann::json::parse(io::read_file(p));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + p.string() + ": " + e.what());
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Escalator condition monitoring and remaining-useful-life toolkit", "escalife"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;
  std::string raw_dir;
  std::string store_dir;
  std::string quarter;
  std::string model = "default";
  std::string spec_path;
  std::string exclude;
  std::string features_csv;
  std::uint64_t seed = 0;
  std::size_t auto_exclude = 0;
  double t_end = health::kDefaultEndOfLifeYears;
  bool refine = false;
  bool renormalize = false;

  auto* simulate = app.add_subcommand("simulate", "Generate a deterministic raw-data corpus");
  simulate->add_option("--config", config, "Simulation config JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "Output raw directory")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Random seed (overrides the config)");

  auto* ingest = app.add_subcommand("ingest", "Validate raw files and add them to a store");
  ingest->add_option("--raw", raw_dir, "Raw data directory")->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--store", store_dir, "Store directory")->required();

  auto* bands = app.add_subcommand("bands", "Select dominant vibration bands from stored spectra");
  bands->add_option("--store", store_dir, "Store directory")->required();

  auto* features = app.add_subcommand("features", "Compute daily, A_t and quarterly features");
  features->add_option("--store", store_dir, "Store directory")->required();
  features->add_option("--quarter", quarter, "Last quarter to compute, e.g. 2021Q4")->required()->check(check_quarter);
  features->add_flag("--renormalize-missing", renormalize, "Renormalise sensor weights when points are missing");

  auto* fit = app.add_subcommand("fit", "Fit the reference LHI model");
  fit->add_option("--store", store_dir, "Store directory")->required();
  fit->add_option("--t-end", t_end, "End-of-life age in years")->check(CLI::PositiveNumber);
  auto* excl = fit->add_option("--exclude", exclude, "Comma-separated escalator ids to leave out");
  auto* auto_excl = fit->add_option("--auto-exclude", auto_exclude, "Drop the K points with the largest log residual");
  excl->excludes(auto_excl);
  fit->add_flag("--refine", refine, "Refine with Gauss-Newton on direct residuals");
  fit->add_option("--out", out_path, "Model JSON (relative paths resolve in the store)")->required();

  auto* rul = app.add_subcommand("rul", "Estimate remaining useful life for one quarter");
  rul->add_option("--store", store_dir, "Store directory")->required();
  rul->add_option("--model", model, "Model JSON, a stored model name, or 'default'");
  rul->add_option("--quarter", quarter, "Quarter, e.g. 2021Q4")->required()->check(check_quarter);
  rul->add_option("--features", features_csv, "Quarter features CSV to use instead of the store's")
      ->check(CLI::ExistingFile);
  rul->add_option("--out", out_path, "Output CSV (relative paths resolve in the store)")->required();

  auto* report = app.add_subcommand("report", "Render a static HTML report");
  report->add_option("--store", store_dir, "Store directory")->required();
  report->add_option("--spec", spec_path, "Report spec JSON")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out_path, "Output HTML")->required();

  auto* verify = app.add_subcommand("verify", "Recount store partitions against the manifest");
  verify->add_option("--store", store_dir, "Store directory")->required();

  std::vector<const char*> argv{"escalife"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      auto cfg = synth::sim_config_from_json(read_json(config));
      if (seed_opt->count() > 0) cfg.seed = seed;
      const auto s = synth::write_raw_corpus(cfg, out_path);
      out << fmt::format("simulate: {} files, {} energy rows, {} spectra\n", s.files, s.energy_rows, s.spectra);
      return kExitOk;
    }
    if (ingest->parsed()) {
      auto st = store::Store::open_or_create(store_dir);
      const auto r = st.ingest(raw_dir);
      for (const auto& f : r.rejected_files) err << fmt::format("rejected file {}:{}: {}\n", f.file, f.line, f.reason);
      for (const auto& row : r.rejected_rows) {
        err << fmt::format("rejected row {}:{}: {}\n", row.file, row.line, row.reason);
      }
      out << fmt::format("ingest: files {}, rows {}, already present {}, rejected rows {}, rejected files {}\n",
                         r.files, r.rows, r.already_present, r.rejected, r.rejected_files.size());
      return r.ok() ? kExitOk : kExitValidation;
    }
    if (bands->parsed()) {
      auto st = store::Store::open(store_dir);
      const auto sel = pipeline::run_bands(st);
      for (const auto* b : {&sel.high, &sel.low}) {
        out << fmt::format("bands: {} [{}, {}] kHz\n", to_string(b->freq_class), io::shortest(b->band_lo_khz),
                           io::shortest(b->band_hi_khz));
      }
      return kExitOk;
    }
    if (features->parsed()) {
      auto st = store::Store::open(store_dir);
      pipeline::FeatureOptions opts;
      if (renormalize) opts.aggregation.missing_sensors = vibration::MissingSensorPolicy::Renormalize;
      const auto s = pipeline::run_features(st, Quarter::parse(quarter), opts);
      for (const auto& w : s.warnings) err << "warning: " << w << '\n';
      out << fmt::format("features: {} days, {} A_t records, {} quarters, {} escalator-quarters\n", s.days,
                         s.at_records, s.quarters.size(), s.quarter_rows);
      return kExitOk;
    }
    if (fit->parsed()) {
      auto st = store::Store::open(store_dir);
      health::FitOptions opts;
      opts.t_end_years = t_end;
      opts.exclude_ids = parse_ids(exclude);
      opts.auto_exclude = auto_exclude;
      opts.refine = refine;
      const auto m = pipeline::run_fit(st, opts);
      const fs::path dst = pipeline::resolve_output(st, out_path);
      io::write_file_atomic(dst, health::to_json(m).dump(2) + "\n");
      out << fmt::format("fit: a = {}, b = {}, t_end = {}, {} points\n", io::shortest(m.a), io::shortest(m.b),
                         io::shortest(m.t_end_years), m.fitted_on.size());
      return kExitOk;
    }
    if (rul->parsed()) {
      auto st = store::Store::open(store_dir);
      const Quarter q = Quarter::parse(quarter);
      const auto m = pipeline::resolve_model(st, model);
      std::vector<health::QuarterFeatures> rows =
          features_csv.empty() ? st.query_quarter(q) : pipeline::read_quarter_csv(features_csv);
      std::erase_if(rows, [&](const auto& f) { return f.quarter != q; });
      if (rows.empty()) throw Error("no quarter features for " + q.to_string());
      const auto result = pipeline::run_rul(rows, m);
      io::write_file_atomic(pipeline::resolve_output(st, out_path), pipeline::rul_csv(result));
      out << fmt::format("rul: {} escalators for {}\n", result.size(), q.to_string());
      return kExitOk;
    }
    if (report->parsed()) {
      auto st = store::Store::open(store_dir);
      const auto spec = report::report_spec_from_json(read_json(spec_path));
      const auto r = report::render_report(spec, st);
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
      io::write_file_atomic(out_path, r.html);
      out << fmt::format("report: {} bytes\n", r.html.size());
      return kExitOk;
    }
    if (verify->parsed()) {
      const auto st = store::Store::open(store_dir);
      const auto r = st.verify();
      for (const auto& p : r.problems) err << "verify: " << p << '\n';
      out << fmt::format("verify: {} files checked, {} problems\n", r.files_checked, r.problems.size());
      return r.ok() ? kExitOk : kExitValidation;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace escalife::cli
