#include "escalife/vibration.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "escalife/error.hpp"

namespace escalife::vibration {

namespace {

std::size_t frequency_to_index(double hz, double bin_hz) {
  const double x = hz / bin_hz;
  const double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool in_window(int minute, ClockTime start, ClockTime end) {
  return minute >= start.minutes && minute < end.minutes;
}

}  // namespace

void validate(const SpectrumRecord& spec) {
  if (!(spec.bin_hz > 0.0)) throw Error("spectrum bin_hz must be positive");
  if (spec.magnitudes.empty()) throw Error("spectrum has no bins");
  const double expected = kSpectrumMaxHz / spec.bin_hz;
  const double n = static_cast<double>(spec.magnitudes.size());
  if (n < expected - 1e-6 || n > expected + 1.0 + 1e-6) {
    throw Error("spectrum has " + std::to_string(spec.magnitudes.size()) + " bins; expected " +
                std::to_string(static_cast<long>(std::llround(expected))) + " for bin_hz " +
                std::to_string(spec.bin_hz));
  }
  for (double m : spec.magnitudes) {
    if (!(m >= 0.0)) throw Error("spectrum magnitudes must be finite and non-negative");
  }
}

SpectrumRecord fft_magnitude(std::span<const double> samples, double sample_rate_hz) {
  if (samples.empty()) throw Error("fft_magnitude: empty input");
  if (sample_rate_hz < 2.0 * kSpectrumMaxHz) {
    throw Error("fft_magnitude: sample rate must be at least 25.6 kHz");
  }
  std::size_t n = 1;
  while (n < samples.size()) n <<= 1;

  SpectrumRecord out;
  out.bin_hz = sample_rate_hz / static_cast<double>(n);
  if (n == 1) {
    out.magnitudes = {std::abs(samples[0])};
    return out;
  }

  std::vector<double> in(n, 0.0);
  std::copy(samples.begin(), samples.end(), in.begin());
  std::vector<std::complex<double>> spectrum(n / 2 + 1);
  auto* dst = reinterpret_cast<fftw_complex*>(spectrum.data());

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), dst, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  out.magnitudes.resize(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double scale = (k == 0 || k == n / 2) ? inv_n : std::sqrt(2.0) * inv_n;
    out.magnitudes[k] = std::abs(spectrum[k]) * scale;
  }
  return out;
}

BinRange band_bins(const SpectrumRecord& spec, double lo_khz, double hi_khz) {
  const double max_khz = kSpectrumMaxHz / 1000.0;
  if (!(lo_khz >= 0.0) || !(hi_khz <= max_khz + 1e-9) || !(lo_khz < hi_khz)) {
    throw Error("band [" + std::to_string(lo_khz) + ", " + std::to_string(hi_khz) +
                ") kHz is outside [0, 12.8] kHz or empty");
  }
  const std::size_t n = spec.magnitudes.size();
  BinRange r;
  r.first = std::min(frequency_to_index(lo_khz * 1000.0, spec.bin_hz), n);
  r.last = hi_khz >= max_khz - 1e-9 ? n : std::min(frequency_to_index(hi_khz * 1000.0, spec.bin_hz), n);
  if (r.last <= r.first) {
    throw Error("band [" + std::to_string(lo_khz) + ", " + std::to_string(hi_khz) + ") kHz contains no bins");
  }
  return r;
}

double band_rms(const SpectrumRecord& spec, double lo_khz, double hi_khz) {
  const BinRange r = band_bins(spec, lo_khz, hi_khz);
  double sum_sq = 0.0;
  for (std::size_t i = r.first; i < r.last; ++i) sum_sq += spec.magnitudes[i] * spec.magnitudes[i];
  return std::sqrt(sum_sq / static_cast<double>(r.size()));
}

BandScorer::BandScorer(FreqClass freq_class, const BandSelectionOptions& options)
    : freq_class_(freq_class), options_(options) {
  if (!(options.band_width_khz > 0.0)) throw Error("band width must be positive");
  const double max_khz = kSpectrumMaxHz / 1000.0;
  for (int k = 0;; ++k) {
    const double lo = k * options.band_width_khz;
    if (lo >= max_khz - 1e-9) break;
    edges_.emplace_back(lo, std::min((k + 1) * options.band_width_khz, max_khz));
  }
  rms_.resize(edges_.size());
}

void BandScorer::add(const SpectrumRecord& spec) {
  for (std::size_t b = 0; b < edges_.size(); ++b) rms_[b].push_back(band_rms(spec, edges_[b].first, edges_[b].second));
  ++count_;
}

BandSelection BandScorer::finish() const {
  if (count_ == 0) throw Error("select_dominant_bands: empty corpus");
  BandSelection sel;
  sel.freq_class = freq_class_;

  for (std::size_t b = 0; b < edges_.size(); ++b) {
    std::vector<double> rms = rms_[b];
    std::sort(rms.begin(), rms.end());
    BandStats st;
    st.lo_khz = edges_[b].first;
    st.hi_khz = edges_[b].second;
    st.median_rms = quantile(rms, 0.5);
    st.q1 = quantile(rms, 0.25);
    st.q3 = quantile(rms, 0.75);
    const double fence = st.q3 + 1.5 * (st.q3 - st.q1);
    st.extreme_count = static_cast<std::size_t>(
        std::count_if(rms.begin(), rms.end(), [fence](double v) { return v > fence; }));
    const bool noise_band = st.hi_khz <= options_.noise_cutoff_khz + 1e-9;
    st.score = noise_band ? 0.0
                          : st.median_rms * (1.0 - static_cast<double>(st.extreme_count) /
                                                       static_cast<double>(rms.size()));
    sel.bands.push_back(st);
  }

  double best = 0.0;
  for (const auto& b : sel.bands) best = std::max(best, b.score);
  if (!(best > 0.0)) throw Error("select_dominant_bands: corpus carries no energy outside the noise band");

  const double cut = options_.score_fraction * best;
  std::size_t best_start = 0;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < sel.bands.size();) {
    if (!(sel.bands[i].score > cut)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < sel.bands.size() && sel.bands[j].score > cut) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  sel.band_lo_khz = sel.bands[best_start].lo_khz;
  sel.band_hi_khz = sel.bands[best_start + best_len - 1].hi_khz;
  return sel;
}

BandSelection select_dominant_bands(FreqClass freq_class, std::span<const SpectrumRecord> corpus,
                                    const BandSelectionOptions& options) {
  BandScorer scorer(freq_class, options);
  for (const auto& spec : corpus) scorer.add(spec);
  return scorer.finish();
}

BandSelection default_band_selection(FreqClass freq_class) {
  BandSelection s;
  s.freq_class = freq_class;
  if (freq_class == FreqClass::HighFrequency) {
    s.band_lo_khz = 2.0;
    s.band_hi_khz = 10.0;
  } else {
    s.band_lo_khz = 1.0;
    s.band_hi_khz = 7.5;
  }
  return s;
}

nlohmann::json to_json(const BandSelections& s) {
  auto one = [](const BandSelection& b) {
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& st : b.bands) {
      bands.push_back({{"lo_khz", st.lo_khz},
                       {"hi_khz", st.hi_khz},
                       {"median_rms", st.median_rms},
                       {"q1", st.q1},
                       {"q3", st.q3},
                       {"extreme_count", st.extreme_count},
                       {"score", st.score}});
    }
    return nlohmann::json{{"freq_class", to_string(b.freq_class)},
                          {"band_lo_khz", b.band_lo_khz},
                          {"band_hi_khz", b.band_hi_khz},
                          {"bands", bands}};
  };
  return nlohmann::json{{"high", one(s.high)}, {"low", one(s.low)}};
}

BandSelections band_selections_from_json(const nlohmann::json& j) {
  auto one = [](const nlohmann::json& o, FreqClass expected) {
    BandSelection b;
    b.freq_class = parse_freq_class(o.at("freq_class").get<std::string>());
    if (b.freq_class != expected) throw Error("band selection file has mismatched classes");
    b.band_lo_khz = o.at("band_lo_khz").get<double>();
    b.band_hi_khz = o.at("band_hi_khz").get<double>();
    if (!(b.band_lo_khz >= 0.0 && b.band_lo_khz < b.band_hi_khz && b.band_hi_khz <= 12.8 + 1e-9)) {
      throw Error("band selection out of range");
    }
    if (o.contains("bands")) {
      for (const auto& st : o.at("bands")) {
        BandStats s;
        s.lo_khz = st.at("lo_khz").get<double>();
        s.hi_khz = st.at("hi_khz").get<double>();
        s.median_rms = st.at("median_rms").get<double>();
        s.q1 = st.at("q1").get<double>();
        s.q3 = st.at("q3").get<double>();
        s.extreme_count = st.at("extreme_count").get<std::size_t>();
        s.score = st.at("score").get<double>();
        b.bands.push_back(s);
      }
    }
    return b;
  };
  try {
    BandSelections s;
    s.high = one(j.at("high"), FreqClass::HighFrequency);
    s.low = one(j.at("low"), FreqClass::LowFrequency);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid band selection file: ") + e.what());
  }
}

std::string_view to_string(AtStatus s) {
  switch (s) {
    case AtStatus::Normal: return "Normal";
    case AtStatus::Alert: return "Alert";
    case AtStatus::Alarm: return "Alarm";
  }
  return "?";
}

AtStatus parse_at_status(std::string_view text) {
  if (text == "Normal") return AtStatus::Normal;
  if (text == "Alert") return AtStatus::Alert;
  if (text == "Alarm") return AtStatus::Alarm;
  throw Error("unknown A_t status '" + std::string(text) + "'");
}

double at_value(const SpectrumRecord& spec, const BandSelection& selection) {
  const BinRange r = band_bins(spec, selection.band_lo_khz, selection.band_hi_khz);
  double sum_sq = 0.0;
  for (std::size_t i = r.first; i < r.last; ++i) sum_sq += spec.magnitudes[i] * spec.magnitudes[i];
  return std::sqrt(sum_sq / kAtDivisor);
}

AtStatus classify(double at_g, const ThresholdRow& row) {
  if (at_g >= row.alarm_g) return AtStatus::Alarm;
  if (at_g >= row.alert_g) return AtStatus::Alert;
  return AtStatus::Normal;
}

AtRecord compute_at(const SpectrumRecord& spec, const BandSelection& selection,
                    const ThresholdTable& thresholds) {
  const SensorPoint& point = sensor_point(spec.point_id);
  if (point.freq_class != selection.freq_class) {
    throw Error("point " + std::to_string(spec.point_id) + " is " + std::string(to_string(point.freq_class)) +
                " but the band selection is " + std::string(to_string(selection.freq_class)));
  }
  AtRecord rec;
  rec.escalator_id = spec.escalator_id;
  rec.point_id = spec.point_id;
  rec.timestamp = spec.timestamp;
  rec.at_g = at_value(spec, selection);
  rec.status = classify(rec.at_g, thresholds.at(point.location));
  return rec;
}

std::vector<AtRecord> daily_at_reduction(std::span<const AtRecord> records, const ServiceWindow& window,
                                         const LocalClock& clock, const ReductionWindows& windows) {
  std::vector<AtRecord> out;
  if (records.empty()) return out;
  const AtRecord& head = records.front();
  const Date day = clock.service_date(head.timestamp);
  for (const auto& r : records) {
    if (r.escalator_id != head.escalator_id || r.point_id != head.point_id || clock.service_date(r.timestamp) != day) {
      throw Error("daily_at_reduction: records must share escalator, point and service day");
    }
  }

  std::array<const AtRecord*, 3> best{};
  for (const auto& r : records) {
    if (!window.contains_slot(clock.service_slot(r.timestamp))) continue;
    const int minute = clock.local_minute_of_day(r.timestamp);
    for (std::size_t w = 0; w < 3; ++w) {
      if (!in_window(minute, windows.start[w], windows.end[w])) continue;
      if (best[w] == nullptr || r.at_g > best[w]->at_g ||
          (r.at_g == best[w]->at_g && r.timestamp < best[w]->timestamp)) {
        best[w] = &r;
      }
      break;
    }
  }
  for (const AtRecord* b : best) {
    if (b != nullptr) out.push_back(*b);
  }
  std::sort(out.begin(), out.end(), [](const AtRecord& a, const AtRecord& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::vector<AtRecord> reduce_daily(std::span<const AtRecord> records, const ServiceWindow& window,
                                   const LocalClock& clock, const ReductionWindows& windows) {
  std::map<std::pair<int, Date>, std::vector<AtRecord>> groups;
  for (const auto& r : records) groups[{r.point_id, clock.service_date(r.timestamp)}].push_back(r);
  std::vector<AtRecord> out;
  for (auto& [key, group] : groups) {
    auto reduced = daily_at_reduction(group, window, clock, windows);
    out.insert(out.end(), reduced.begin(), reduced.end());
  }
  return out;
}

double exceedance_probability(std::span<const double> values, double tau) {
  if (values.empty()) throw Error("exceedance_probability: empty set");
  const auto above = std::count_if(values.begin(), values.end(), [tau](double x) { return x > tau; });
  return static_cast<double>(above) / static_cast<double>(values.size());
}

ExceedanceCurve exceedance_curve(std::span<const double> values) {
  if (values.empty()) throw Error("exceedance_curve: empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw Error("exceedance_curve: values must be non-negative");

  const double n = static_cast<double>(sorted.size());
  ExceedanceCurve c;
  c.threshold.push_back(0.0);
  c.probability.push_back(static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), 0.0)) / n);
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (sorted[i] > 0.0) {
      c.threshold.push_back(sorted[i]);
      c.probability.push_back(static_cast<double>(sorted.size() - j) / n);
    }
    i = j;
  }
  return c;
}

double exceedance_area(std::span<const double> values) {
  if (values.empty()) throw Error("exceedance_area: empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw Error("exceedance_area: values must be non-negative");

  // On [x_(k-1), x_(k)) exactly n-k+1 values exceed tau.
  const std::size_t n = sorted.size();
  double prev = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    weighted += (sorted[k] - prev) * static_cast<double>(n - k);
    prev = sorted[k];
  }
  return weighted / static_cast<double>(n);
}

double fleet_vibration_status(const std::array<std::optional<double>, kSensorCount>& areas,
                              const std::array<double, kSensorCount>& weights, MissingSensorPolicy policy) {
  double total = 0.0;
  double weight_present = 0.0;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    if (!areas[i]) {
      if (policy == MissingSensorPolicy::Error) {
        throw Error("fleet_vibration_status: no exceedance area for sensor point " + std::to_string(i + 1));
      }
      continue;
    }
    total += weights[i] * *areas[i];
    weight_present += weights[i];
  }
  if (policy == MissingSensorPolicy::Renormalize) {
    if (!(weight_present > 0.0)) throw Error("fleet_vibration_status: no sensor areas present");
    return total / weight_present;
  }
  return total;
}

}  // namespace escalife::vibration
