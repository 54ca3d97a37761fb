#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "../tools/cli.hpp"
#include "escalife/error.hpp"
#include "escalife/io.hpp"
#include "escalife/pipeline.hpp"
#include "escalife/report.hpp"
#include "escalife/store.hpp"
#include "escalife/synth.hpp"

using namespace escalife;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << content;
}

fs::path data_dir() { return fs::path(ESCALIFE_DATA_DIR); }

// One quarter of synthetic data for three escalators, run through the whole
// command chain once and shared by the cases below.
struct Quarterly {
  fs::path root = fs::temp_directory_path() / "escalife_pipeline_q";
  fs::path store = root / "store";
  std::string rul_csv;
  std::string html;

  Quarterly() {
    fs::remove_all(root);
    synth::SimConfig cfg;
    cfg.seed = 7;
    cfg.start_date = parse_date("2021-10-01");
    cfg.end_date = parse_date("2021-12-31");
    cfg.fleet.resize(3);
    cfg.spectrum_bins = 256;
    write(root / "sim.json", synth::to_json(cfg).dump());
    write(root / "spec.json",
          R"({"period": {"from": "2021-10-01", "to": "2021-12-31"}, "sheets": ["Overview", "Energy", "Vibration", "RUL"]})");

    const std::string s = store.string();
    auto step = [](std::vector<std::string> args) {
      const auto r = run(args);
      INFO(args[0], ": ", r.err);
      REQUIRE(r.code == 0);
    };
    step({"simulate", "--config", (root / "sim.json").string(), "--out", (root / "raw").string()});
    step({"ingest", "--raw", (root / "raw").string(), "--store", s});
    step({"bands", "--store", s});
    step({"features", "--store", s, "--quarter", "2021Q4"});
    step({"rul", "--store", s, "--quarter", "2021Q4", "--out", "rul.csv"});
    step({"report", "--store", s, "--spec", (root / "spec.json").string(), "--out", (root / "report.html").string()});
    rul_csv = io::read_file(store / "rul.csv");
    html = io::read_file(root / "report.html");
  }
};

const Quarterly& quarterly() {
  static const Quarterly q;
  return q;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"nonsense"}).code == cli::kExitUsage);
    CHECK(run({"features", "--store", "/tmp/x", "--quarter", "2021Q5"}).code == cli::kExitUsage);
    CHECK(run({"rul", "--store", "/tmp/x", "--quarter", "Q4-2021", "--out", "r.csv"}).code == cli::kExitUsage);
    CHECK(run({"fit", "--store", "/tmp/x", "--out", "m.json", "--exclude", "1", "--auto-exclude", "2"}).code ==
          cli::kExitUsage);
    CHECK(run({"verify"}).code == cli::kExitUsage);
    CHECK(run({"--help"}).code == cli::kExitOk);
  }

  TEST_CASE("runtime failures exit with 1") {
    const fs::path missing = fs::temp_directory_path() / "escalife_no_store_here";
    fs::remove_all(missing);
    CHECK(run({"verify", "--store", missing.string()}).code == cli::kExitValidation);
    CHECK(run({"rul", "--store", missing.string(), "--quarter", "2021Q4", "--out", "r.csv"}).code ==
          cli::kExitValidation);
  }

  TEST_CASE("a synthetic quarter runs end to end") {
    const auto& q = quarterly();
    const auto rows = io::lines(q.rul_csv);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == io::kRulHeader);

    auto st = store::Store::open(q.store);
    CHECK(st.verify().ok());
    const auto features = st.query_quarter(Quarter{2021, 4});
    REQUIRE(features.size() == 3);
    for (const auto& f : features) {
      CHECK(f.lhi > 0.0);
      CHECK(f.lhi < 1.0);
      CHECK(st.query_daily(f.escalator_id, parse_date("2021-10-01"), parse_date("2021-12-31")).size() == 92);
      CHECK(st.query_at(f.escalator_id, parse_date("2021-10-01"), parse_date("2021-12-31")).size() <= 92u * 8u * 3u);
    }

    const auto bands = pipeline::load_bands(st);
    CHECK(bands.high.band_lo_khz == 2.0);
    CHECK(bands.high.band_hi_khz == 10.0);
    CHECK(bands.low.band_lo_khz == 1.0);
    CHECK(bands.low.band_hi_khz == 7.5);
  }

  TEST_CASE("report RUL annotations match the CSV") {
    const auto& q = quarterly();
    const auto rows = io::lines(q.rul_csv);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto f = io::split(rows[i]);
      const std::string needle =
          "data-escalator=\"" + std::string(f[0]) + "\" data-rul=\"" + std::string(f[5]) + "\"";
      CHECK_MESSAGE(q.html.find(needle) != std::string::npos, needle);
      CHECK(q.html.find("RUL = " + std::string(f[5]) + " years") != std::string::npos);
    }
    CHECK(q.html.find("class=\"no-data\"") == std::string::npos);
  }

  TEST_CASE("reports are deterministic") {
    const auto& q = quarterly();
    const auto again = run({"report", "--store", q.store.string(), "--spec", (q.root / "spec.json").string(), "--out",
                            (q.root / "again.html").string()});
    REQUIRE(again.code == 0);
    CHECK(io::read_file(q.root / "again.html") == q.html);
  }

  TEST_CASE("re-ingesting adds nothing") {
    const auto& q = quarterly();
    const auto r = run({"ingest", "--raw", (q.root / "raw").string(), "--store", q.store.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("rows 0,") != std::string::npos);
  }

  TEST_CASE("an empty store reports no data on every sheet") {
    const fs::path root = fs::temp_directory_path() / "escalife_pipeline_empty";
    fs::remove_all(root);
    auto st = store::Store::open_or_create(root / "store");
    report::ReportSpec spec;
    spec.from = parse_date("2021-10-01");
    spec.to = parse_date("2021-12-31");
    const auto r = report::render_report(spec, st);
    std::size_t count = 0;
    for (auto pos = r.html.find("class=\"no-data\""); pos != std::string::npos;
         pos = r.html.find("class=\"no-data\"", pos + 1)) {
      ++count;
    }
    CHECK(count == 4);
    fs::remove_all(root);
  }

  TEST_CASE("a single alarm is marked in the vibration sheet") {
    const fs::path root = fs::temp_directory_path() / "escalife_pipeline_alarm";
    fs::remove_all(root);
    auto st = store::Store::open_or_create(root / "store");
    vibration::AtRecord rec;
    rec.escalator_id = 4;
    rec.point_id = 6;
    rec.timestamp = st.clock().service_clock_time(parse_date("2021-11-02"), ClockTime{10 * 60});
    rec.at_g = 0.31;
    rec.status = vibration::AtStatus::Alarm;
    st.write_at(4, {rec});

    report::ReportSpec spec;
    spec.escalators = {4};
    spec.from = parse_date("2021-10-01");
    spec.to = parse_date("2021-12-31");
    spec.sheets = {report::Sheet::Overview, report::Sheet::Vibration};
    const auto html = report::render_report(spec, st).html;
    const std::regex alarm_point("<circle class=\"pt Alarm\"");
    CHECK(std::distance(std::sregex_iterator(html.begin(), html.end(), alarm_point), std::sregex_iterator()) == 1);
    CHECK(html.find("<td class=\"alarms\">1</td>") != std::string::npos);
    fs::remove_all(root);
  }

  TEST_CASE("report spec validation") {
    CHECK_THROWS_AS(report::report_spec_from_json(nlohmann::json::parse(R"({"period": {"from": "2021-12-01"}})")),
                    Error);
    CHECK_THROWS_AS(report::report_spec_from_json(nlohmann::json::parse(
                        R"({"period": {"from": "2021-12-01", "to": "2021-11-01"}})")),
                    Error);
    CHECK(report::parse_sheet("RUL") == report::Sheet::Rul);
  }

  TEST_CASE("CLI RUL on the bundled fleet features matches the library") {
    const fs::path root = fs::temp_directory_path() / "escalife_pipeline_ref";
    fs::remove_all(root);
    store::Store::open_or_create(root / "store");
    const fs::path csv = data_dir() / "reference_fleet_2021Q4.csv";
    const auto r = run({"rul", "--store", (root / "store").string(), "--features", csv.string(), "--quarter", "2021Q4",
                        "--model", (data_dir() / "default_model.json").string(), "--out", (root / "rul.csv").string()});
    INFO(r.err);
    REQUIRE(r.code == 0);
    const auto expected =
        pipeline::rul_csv(pipeline::run_rul(pipeline::read_quarter_csv(csv), health::LhiModel::reference()));
    CHECK(io::read_file(root / "rul.csv") == expected);
    const auto rows = io::lines(expected);
    REQUIRE(rows.size() == 25);
    CHECK(io::split(rows[12])[5] == "24.3038");
    fs::remove_all(root);
  }
}
