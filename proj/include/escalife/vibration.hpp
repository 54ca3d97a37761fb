#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "escalife/domain.hpp"
#include "escalife/time.hpp"

namespace escalife::vibration {

inline constexpr double kSpectrumMaxHz = 12800.0;
/// Divisor inside the A_t root-energy statistic.
inline constexpr double kAtDivisor = 1.5;

/// One sensor's FFT acceleration magnitude spectrum (g per bin). Bin `i` is
/// centred on `i * bin_hz`.
struct SpectrumRecord {
  int escalator_id = 0;
  int point_id = 0;
  Timestamp timestamp{};
  double bin_hz = 10.0;
  std::vector<double> magnitudes;
};

/// Checks non-negative magnitudes and that the bins cover 0..12.8 kHz.
void validate(const SpectrumRecord& spec);

/// One-sided magnitude spectrum of a real signal, zero-padded to a power of
/// two. Magnitudes are RMS-normalised, so the sum of their squares equals the
/// mean square of the padded signal and a unit sine on a bin centre has
/// magnitude 1/sqrt(2).
SpectrumRecord fft_magnitude(std::span<const double> samples, double sample_rate_hz);

struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;  // exclusive
  std::size_t size() const { return last - first; }
};

/// Bins whose centre frequency lies in [lo, hi); the band ending at 12.8 kHz
/// includes the final bin.
BinRange band_bins(const SpectrumRecord& spec, double lo_khz, double hi_khz);

double band_rms(const SpectrumRecord& spec, double lo_khz, double hi_khz);

struct BandStats {
  double lo_khz = 0.0;
  double hi_khz = 0.0;
  double median_rms = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t extreme_count = 0;
  double score = 0.0;
};

struct BandSelection {
  FreqClass freq_class = FreqClass::HighFrequency;
  double band_lo_khz = 0.0;
  double band_hi_khz = kSpectrumMaxHz / 1000.0;
  std::vector<BandStats> bands;
};

struct BandSelectionOptions {
  double band_width_khz = 0.5;
  /// Bands below this are dropped as on-site noise.
  double noise_cutoff_khz = 0.5;
  /// Keep bands whose score exceeds this fraction of the best score.
  double score_fraction = 0.2;
};

/// Accumulates per-band RMS values one record at a time, so a corpus can be
/// scored without holding every spectrum in memory.
class BandScorer {
 public:
  explicit BandScorer(FreqClass freq_class, const BandSelectionOptions& options = {});

  void add(const SpectrumRecord& spec);
  std::size_t count() const { return count_; }
  BandSelection finish() const;

 private:
  FreqClass freq_class_;
  BandSelectionOptions options_;
  std::vector<std::pair<double, double>> edges_;
  std::vector<std::vector<double>> rms_;
  std::size_t count_ = 0;
};

/// Scores fixed-width bands across a corpus of one frequency class and returns
/// the longest contiguous run of high-energy, low-outlier bands.
BandSelection select_dominant_bands(FreqClass freq_class, std::span<const SpectrumRecord> corpus,
                                    const BandSelectionOptions& options = {});

/// [2, 10] kHz for gearbox/motor, [1, 7.5] kHz for main drive/tension carriage.
BandSelection default_band_selection(FreqClass freq_class);

struct BandSelections {
  BandSelection high = default_band_selection(FreqClass::HighFrequency);
  BandSelection low = default_band_selection(FreqClass::LowFrequency);

  const BandSelection& for_class(FreqClass c) const {
    return c == FreqClass::HighFrequency ? high : low;
  }
};

nlohmann::json to_json(const BandSelections& s);
BandSelections band_selections_from_json(const nlohmann::json& j);

enum class AtStatus { Normal, Alert, Alarm };

std::string_view to_string(AtStatus s);
AtStatus parse_at_status(std::string_view text);

struct AtRecord {
  int escalator_id = 0;
  int point_id = 0;
  Timestamp timestamp{};
  double at_g = 0.0;
  AtStatus status = AtStatus::Normal;
};

/// sqrt(sum x^2 / 1.5) over the bins of the selected band.
double at_value(const SpectrumRecord& spec, const BandSelection& selection);

/// Inclusive comparison: a value on a threshold line takes that status.
AtStatus classify(double at_g, const ThresholdRow& row);

AtRecord compute_at(const SpectrumRecord& spec, const BandSelection& selection,
                    const ThresholdTable& thresholds);

struct ReductionWindows {
  std::array<ClockTime, 3> start{ClockTime{6 * 60}, ClockTime{11 * 60}, ClockTime{16 * 60}};
  std::array<ClockTime, 3> end{ClockTime{11 * 60}, ClockTime{16 * 60}, ClockTime{24 * 60}};
};

/// Keeps at most three records for one escalator-point-day: the maximum A_t in
/// each reduction window, after dropping records outside the service window.
std::vector<AtRecord> daily_at_reduction(std::span<const AtRecord> records, const ServiceWindow& window,
                                         const LocalClock& clock, const ReductionWindows& windows = {});

/// Applies daily_at_reduction per (point, service day). Input must belong to
/// one escalator; output is ordered by point, then time.
std::vector<AtRecord> reduce_daily(std::span<const AtRecord> records, const ServiceWindow& window,
                                   const LocalClock& clock, const ReductionWindows& windows = {});

/// Fraction of values strictly greater than tau.
double exceedance_probability(std::span<const double> values, double tau);

/// Breakpoints of the exceedance step function: p(tau) = probability[k] for
/// tau in [threshold[k], threshold[k+1]).
struct ExceedanceCurve {
  std::vector<double> threshold;
  std::vector<double> probability;
};

ExceedanceCurve exceedance_curve(std::span<const double> values);

/// Integral of the exceedance curve over [0, max], summed step by step.
double exceedance_area(std::span<const double> values);

enum class MissingSensorPolicy { Error, Renormalize };

/// Weighted sum of per-point exceedance areas (index = point_id - 1).
double fleet_vibration_status(const std::array<std::optional<double>, kSensorCount>& areas,
                              const std::array<double, kSensorCount>& weights,
                              MissingSensorPolicy policy = MissingSensorPolicy::Error);

}  // namespace escalife::vibration
