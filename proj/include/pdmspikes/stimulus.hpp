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

// Stimulus generation: test tones, WAV ingestion and the 1-bit sigma-delta
// modulator standing in for a PDM MEMS microphone.

#ifndef PDMSPIKES_STIMULUS_HPP
#define PDMSPIKES_STIMULUS_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pdmspikes/events.hpp"

namespace pdmspikes {

// Uniformly sampled signal. Samples are clipped to [-1, +1] on construction.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> samples, double sample_rate_hz);

  const std::vector<double>& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_ = 1.0;
};

// One PDM bit per PDM clock period; bit i is sampled at core cycle
// start_cycle + i * pdm_divisor.
struct PdmStream {
  std::vector<std::uint8_t> bits;
  ClockConfig clock;
  Cycle start_cycle = 0;

  Cycle cycle_of(std::size_t i) const noexcept {
    return start_cycle + static_cast<Cycle>(i) * clock.pdm_divisor();
  }
};

// samples[i] = amplitude * sin(2*pi*freq*i/rate), round(duration*rate)
// samples. Throws ArgumentError at or above Nyquist.
Waveform synth_sine(double freq_hz, double amplitude, double duration_s,
                    double sample_rate_hz);

// RIFF/WAVE, 16-bit PCM, one or two channels; returns one Waveform per
// channel with samples scaled by 1/32768. Unsupported encodings raise
// FormatError naming the format tag.
std::vector<Waveform> load_wav(std::istream& source);

// Writes a 16-bit PCM WAV with one channel per waveform; all waveforms must
// share length and rate. Used by tests and tools to build fixtures.
void write_wav(std::ostream& sink, const std::vector<Waveform>& channels);

// Zero-order-hold upsampling: output sample j takes input sample
// floor(j * in_rate / target_rate). Throws ArgumentError when downsampling.
Waveform resample_zoh(const Waveform& w, double target_rate_hz);

// Final integrator state plus the largest |s1|, |s2| seen during a run.
struct SigmaDeltaState {
  double s1 = 0.0;
  double s2 = 0.0;
  double peak_s1 = 0.0;
  double peak_s2 = 0.0;
};

// Second-order error-feedback modulator (noise transfer (1 - z^-1)^2):
//   u = x + 2*s1 - s2; bit = (u >= 0); q = bit ? +1 : -1; s2 = s1; s1 = u - q.
// `w` must already be at clock.pdm_clock_hz(); otherwise ArgumentError.
PdmStream sigma_delta_modulate(const Waveform& w, const ClockConfig& clock,
                               SigmaDeltaState* final_state = nullptr);

}  // namespace pdmspikes

#endif  // PDMSPIKES_STIMULUS_HPP
