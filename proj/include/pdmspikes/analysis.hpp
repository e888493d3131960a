// Copyright 2026 The pdmspikes Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Measurements on spike streams: ISI reconstruction, zero crossings,
// THD/SNR, frequency sweeps and cochleograms.

#ifndef PDMSPIKES_ANALYSIS_HPP
#define PDMSPIKES_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdmspikes/events.hpp"
#include "pdmspikes/nas.hpp"

namespace pdmspikes {

struct ReconstructedWaveform {
  std::vector<double> samples;  // normalized signed rate, |x| <= 1
  double sample_rate_hz = 0.0;
  std::size_t clamped = 0;      // samples that hit +/-1
};

// Between spikes k and k+1 the signal is v = p_{k+1} / (ISI_s * full_scale);
// before the first spike and after the last it is 0. Grid sample n is the
// quadratic B-spline weighted average of v around t = n / analysis_rate
// (support of three grid cells), clamped to [-1, 1]. Coincident spikes act
// as point masses p / full_scale. The grid covers [0, horizon), by default
// the stream's end cycle. full_scale_rate <= 0 selects pdm_clock_hz.
ReconstructedWaveform reconstruct_from_isi(
    const SpikeStream& s, double analysis_rate_hz = 100'000.0,
    double full_scale_rate = 0.0, std::optional<Cycle> horizon = std::nullopt);

// Consecutive event pairs with opposite polarity.
std::uint64_t count_zero_crossings(const SpikeStream& s);

// Events whose address belongs to `channel`, addresses unchanged.
SpikeStream select_channel(const SpikeStream& s, std::uint32_t channel);

struct SpectralMeasurement {
  double db = 0.0;
  // The strongest non-DC bin is not within +/-2 bins of f0.
  bool f0_not_peak = false;
};

// Hann-windowed power spectrum; P_h is the power in +/-2 bins around h*f0.
// THD = 10*log10(sum_{h=2..n+1} P_h / P_1). Needs >= 10 periods of f0 and
// f0*(n+1) below Nyquist, otherwise ArgumentError.
SpectralMeasurement measure_thd(const ReconstructedWaveform& w, double f0_hz,
                                unsigned n_harmonics = 9);

// SNR = 10*log10(P_1 / P_noise) with P_noise the power up to band_hz,
// excluding the DC bins 0..2 and the fundamental and harmonic
// neighbourhoods.
SpectralMeasurement measure_snr(const ReconstructedWaveform& w, double f0_hz,
                                unsigned n_harmonics = 9,
                                double band_hz = 20'000.0);

struct BodePoint {
  double freq_hz = 0.0;
  double gain_db = 0.0;    // -inf when the system emitted nothing
  double phase_rad = 0.0;  // unwrapped along the sweep; NaN with -inf gain
};

// Maps front-end spikes to output spikes.
using SpikeSystem = std::function<SpikeStream(const SpikeStream&)>;

struct BodeSettings {
  double amplitude = 0.5;
  double settle_periods = 4.0;
  double measure_periods = 20.0;
  double min_settle_s = 0.02;   // covers the slowest filter transients
  double min_measure_s = 0.05;  // spectral resolution at high f
  double analysis_rate_hz = 100'000.0;
  double full_scale_rate = 0.0;  // <= 0: pdm_clock_hz
  ClockConfig clock;
  unsigned threads = 1;
};

// Per frequency: tone -> modulator -> front-end (reference) -> system. Both
// streams are reconstructed and compared by a Hann-windowed DFT at exactly
// f0 over the measurement window. Results follow the order of `freqs`,
// which must lie in (0, 20 kHz].
std::vector<BodePoint> bode_sweep(const SpikeSystem& system,
                                  const std::vector<double>& freqs,
                                  const BodeSettings& settings = {});

// round(decades * points_per_decade) + 1 log-spaced points, ends included.
std::vector<double> log_spaced_frequencies(double f_min, double f_max,
                                           unsigned points_per_decade);

// Channel x bin event counts for one ear, row-major.
struct EarMatrix {
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const noexcept;
};

struct Cochleogram {
  std::uint32_t channels = 0;
  std::uint32_t bins = 0;
  double bin_s = 0.0;
  std::vector<EarMatrix> ears;  // one (mono) or two (left, right)

  std::uint64_t count(std::size_t ear, std::uint32_t channel,
                      std::uint32_t bin) const {
    return ears.at(ear).counts.at(std::size_t{channel} * bins + bin);
  }
  // Sonogram cell: count / bin_s in spikes per second.
  double rate(std::size_t ear, std::uint32_t channel, std::uint32_t bin) const {
    return static_cast<double>(count(ear, channel, bin)) / bin_s;
  }
  // Events per channel summed over time.
  std::vector<std::uint64_t> channel_totals(std::size_t ear) const;
};

// Bins cover [0, horizon) (default: end of stream) and grow to hold every
// event. Addresses outside the bank's map raise FormatError.
Cochleogram cochleogram(const SpikeStream& events, const NasConfig& config,
                        double bin_ms = 20.0,
                        std::optional<Cycle> horizon = std::nullopt);

// Six significant digits, positional notation. Used by every CSV writer.
std::string format_number(double x);

// CSV exports. Column layouts: freq_hz,gain_db,phase_rad / t_s,value /
// channel,b0,b1,... (one row per channel).
void write_bode_csv(std::ostream& os, const std::vector<BodePoint>& points);
void write_reconstruction_csv(std::ostream& os, const ReconstructedWaveform& w);
void write_cochleogram_csv(std::ostream& os, const Cochleogram& c,
                           std::size_t ear);
void write_sonogram_csv(std::ostream& os, const Cochleogram& c,
                        std::size_t ear);

}  // namespace pdmspikes

#endif  // PDMSPIKES_ANALYSIS_HPP
