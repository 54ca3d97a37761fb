#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "escalife/error.hpp"
#include "escalife/vibration.hpp"

using namespace escalife;
using namespace escalife::vibration;

namespace {

SpectrumRecord flat_spectrum(std::size_t bins, double value) {
  SpectrumRecord s;
  s.bin_hz = kSpectrumMaxHz / static_cast<double>(bins);
  s.magnitudes.assign(bins, value);
  return s;
}

SpectrumRecord random_spectrum(std::mt19937_64& rng, std::size_t bins = 1280) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpectrumRecord s = flat_spectrum(bins, 0.0);
  for (auto& m : s.magnitudes) m = u(rng);
  return s;
}

double naive_band_rms(const SpectrumRecord& s, double lo_khz, double hi_khz) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i) {
    const double f = static_cast<double>(i) * s.bin_hz;
    const bool last_band = hi_khz >= 12.8;
    if (f >= lo_khz * 1000.0 && (f < hi_khz * 1000.0 || last_band)) {
      sum += s.magnitudes[i] * s.magnitudes[i];
      ++n;
    }
  }
  return std::sqrt(sum / n);
}

// Spectrum shaped like field data: noisy spikes below 0.5 kHz, energy in the
// dominant band, little elsewhere.
SpectrumRecord shaped_spectrum(std::mt19937_64& rng, double lo_khz, double hi_khz) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpectrumRecord s = flat_spectrum(1280, 0.0);
  const double level = 0.05 + 0.2 * u(rng);
  const bool spiky = u(rng) < 0.3;
  for (std::size_t i = 0; i < s.magnitudes.size(); ++i) {
    const double khz = static_cast<double>(i) * s.bin_hz / 1000.0;
    if (khz < 0.5) {
      s.magnitudes[i] = level * (spiky && u(rng) < 0.2 ? 10.0 + 20.0 * u(rng) : 0.3 * u(rng));
    } else if (khz >= lo_khz && khz < hi_khz) {
      s.magnitudes[i] = level * (0.7 + 0.6 * u(rng));
    } else {
      s.magnitudes[i] = level * 0.08 * u(rng);
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("vibration") {
  TEST_CASE("band_rms matches a naive loop") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto s = random_spectrum(rng);
      for (auto [lo, hi] : {std::pair{2.0, 10.0}, {1.0, 7.5}, {0.0, 0.5}, {10.0, 12.8}, {12.5, 12.8}}) {
        const double expected = naive_band_rms(s, lo, hi);
        CHECK(band_rms(s, lo, hi) == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("band bins use half-open edges") {
    const auto s = flat_spectrum(1280, 1.0);
    const auto r = band_bins(s, 2.0, 10.0);
    CHECK(r.first == 200);
    CHECK(r.last == 1000);
    CHECK(band_bins(s, 10.0, 12.8).last == 1280);
    CHECK_THROWS_AS(band_bins(s, 3.0, 2.0), Error);
    CHECK_THROWS_AS(band_bins(s, 0.0, 13.0), Error);
  }

  TEST_CASE("A_t is sqrt(sum x^2 / 1.5) over the band") {
    SpectrumRecord s = flat_spectrum(1280, 0.0);
    // Two bins inside [2, 10) kHz with squares summing to 1.5.
    s.magnitudes[300] = 1.0;
    s.magnitudes[400] = std::sqrt(0.5);
    s.magnitudes[50] = 100.0;  // outside the band
    CHECK(at_value(s, default_band_selection(FreqClass::HighFrequency)) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("classification is inclusive at both thresholds") {
    const ThresholdRow high{0.375, 0.75, 2.8, 4.5};
    CHECK(classify(0.374999, high) == AtStatus::Normal);
    CHECK(classify(0.375, high) == AtStatus::Alert);
    CHECK(classify(0.749999, high) == AtStatus::Alert);
    CHECK(classify(0.75, high) == AtStatus::Alarm);
    const ThresholdRow low{0.15, 0.3, 2.8, 4.5};
    CHECK(classify(0.15, low) == AtStatus::Alert);
    CHECK(classify(0.3, low) == AtStatus::Alarm);
  }

  TEST_CASE("compute_at rejects a band of the wrong class") {
    SpectrumRecord s = flat_spectrum(1280, 0.1);
    s.point_id = 5;
    CHECK_THROWS_AS(compute_at(s, default_band_selection(FreqClass::HighFrequency), ThresholdTable::defaults()), Error);
    const auto r = compute_at(s, default_band_selection(FreqClass::LowFrequency), ThresholdTable::defaults());
    CHECK(r.at_g == doctest::Approx(std::sqrt(650 * 0.01 / 1.5)));
  }

  TEST_CASE("FFT satisfies Parseval") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (std::size_t n : {1000u, 2048u, 4096u}) {
      std::vector<double> x(n);
      for (auto& v : x) v = g(rng);
      const auto spec = fft_magnitude(x, 25600.0);
      std::size_t padded = 1;
      while (padded < n) padded <<= 1;
      double mean_sq = 0.0;
      for (double v : x) mean_sq += v * v;
      mean_sq /= static_cast<double>(padded);
      double sum_sq = 0.0;
      for (double m : spec.magnitudes) sum_sq += m * m;
      CHECK(sum_sq == doctest::Approx(mean_sq).epsilon(1e-9));
    }
  }

  TEST_CASE("a tone on a bin centre lands in that bin") {
    const std::size_t n = 2560;  // padded to 4096
    const double fs = 25600.0;
    const std::size_t padded = 4096;
    for (std::size_t k : {1u, 100u, 1000u, 2047u}) {
      std::vector<double> x(padded);
      const double f = static_cast<double>(k) * fs / static_cast<double>(padded);
      for (std::size_t i = 0; i < padded; ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs);
      const auto spec = fft_magnitude(x, fs);
      const auto peak = std::max_element(spec.magnitudes.begin(), spec.magnitudes.end()) - spec.magnitudes.begin();
      CHECK(static_cast<std::size_t>(peak) == k);
      CHECK(spec.magnitudes[k] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    }
    CHECK(n < padded);
    CHECK_THROWS_AS(fft_magnitude(std::vector<double>{}, fs), Error);
    CHECK_THROWS_AS(fft_magnitude(std::vector<double>{1.0}, 1000.0), Error);
  }

  TEST_CASE("exceedance probability is strict") {
    const std::vector<double> v{0.1, 0.2, 0.2, 0.4};
    CHECK(exceedance_probability(v, 0.0) == 1.0);
    CHECK(exceedance_probability(v, 0.2) == 0.25);
    CHECK(exceedance_probability(v, 0.4) == 0.0);
  }

  TEST_CASE("exceedance area equals the mean of non-negative values") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> v(1 + rng() % 60);
      for (auto& x : v) x = u(rng);
      if (trial % 10 == 0) v.push_back(v.front());  // ties
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      CHECK(exceedance_area(v) == doctest::Approx(mean).epsilon(1e-12));
    }
    CHECK_THROWS_AS(exceedance_area(std::vector<double>{}), Error);
  }

  TEST_CASE("exceedance curve is a non-increasing step function") {
    const std::vector<double> v{0.3, 0.1, 0.2, 0.2};
    const auto c = exceedance_curve(v);
    REQUIRE(c.threshold.size() == c.probability.size());
    for (std::size_t i = 1; i < c.probability.size(); ++i) {
      CHECK(c.threshold[i] > c.threshold[i - 1]);
      CHECK(c.probability[i] <= c.probability[i - 1]);
    }
    CHECK(c.probability.back() == 0.0);
  }

  TEST_CASE("fleet vibration status weights the point areas") {
    std::array<std::optional<double>, kSensorCount> areas;
    for (int i = 0; i < kSensorCount; ++i) areas[i] = 0.1 * (i + 1);
    const auto w = default_sensor_weights();
    double expected = 0.0;
    for (int i = 0; i < kSensorCount; ++i) expected += w[i] * 0.1 * (i + 1);
    CHECK(fleet_vibration_status(areas, w) == doctest::Approx(expected).epsilon(1e-14));

    areas[4].reset();
    CHECK_THROWS_AS(fleet_vibration_status(areas, w), Error);
    double kept_weight = 0.0;
    double kept = 0.0;
    for (int i = 0; i < kSensorCount; ++i) {
      if (i == 4) continue;
      kept_weight += w[i];
      kept += w[i] * 0.1 * (i + 1);
    }
    CHECK(fleet_vibration_status(areas, w, MissingSensorPolicy::Renormalize) ==
          doctest::Approx(kept / kept_weight).epsilon(1e-14));
  }

  TEST_CASE("dominant band selection recovers the shaped bands") {
    std::mt19937_64 rng(23);
    std::vector<SpectrumRecord> high;
    std::vector<SpectrumRecord> low;
    for (int i = 0; i < 300; ++i) {
      high.push_back(shaped_spectrum(rng, 2.0, 10.0));
      low.push_back(shaped_spectrum(rng, 1.0, 7.5));
    }
    const auto h = select_dominant_bands(FreqClass::HighFrequency, high);
    CHECK(h.band_lo_khz == 2.0);
    CHECK(h.band_hi_khz == 10.0);
    CHECK(h.bands.front().score == 0.0);
    const auto l = select_dominant_bands(FreqClass::LowFrequency, low);
    CHECK(l.band_lo_khz == 1.0);
    CHECK(l.band_hi_khz == 7.5);

    BandScorer scorer(FreqClass::HighFrequency);
    for (const auto& s : high) scorer.add(s);
    CHECK(scorer.finish().band_lo_khz == h.band_lo_khz);
    CHECK_THROWS_AS(select_dominant_bands(FreqClass::HighFrequency, std::vector<SpectrumRecord>{}), Error);
  }

  TEST_CASE("band selections survive JSON") {
    BandSelections s;
    s.high.band_lo_khz = 2.5;
    const auto back = band_selections_from_json(to_json(s));
    CHECK(back.high.band_lo_khz == 2.5);
    CHECK(back.low.band_hi_khz == 7.5);
  }

  TEST_CASE("daily reduction keeps the window maxima inside the service window") {
    const LocalClock hk;
    const ServiceWindow window;
    const Date d = parse_date("2021-10-04");
    auto rec = [&](const char* local, double at) {
      AtRecord r;
      r.escalator_id = 1;
      r.point_id = 2;
      r.timestamp = hk.service_clock_time(d, parse_clock(local));
      r.at_g = at;
      return r;
    };
    const std::vector<AtRecord> recs{rec("02:30", 9.0), rec("07:00", 0.2), rec("09:00", 0.3), rec("12:00", 0.1),
                                     rec("15:59", 0.4), rec("16:00", 0.05), rec("23:59", 0.06), rec("00:30", 5.0)};
    const auto out = daily_at_reduction(recs, window, hk);
    REQUIRE(out.size() == 3);
    CHECK(out[0].at_g == 0.3);
    CHECK(out[1].at_g == 0.4);
    CHECK(out[2].at_g == 0.06);

    const auto all = reduce_daily(recs, window, hk);
    CHECK(all.size() == 3);
  }

  TEST_CASE("spectrum validation") {
    auto s = flat_spectrum(1280, 0.1);
    CHECK_NOTHROW(validate(s));
    s.magnitudes.push_back(0.1);
    CHECK_NOTHROW(validate(s));
    s.magnitudes.push_back(0.1);
    CHECK_THROWS_AS(validate(s), Error);
    auto neg = flat_spectrum(1280, 0.1);
    neg.magnitudes[3] = -1.0;
    CHECK_THROWS_AS(validate(neg), Error);
  }
}
