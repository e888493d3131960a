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

// Spike signal processing blocks.
//
// SLPF: an integrator I counts input spikes minus output spikes; a phase
// accumulator converts |I| into an output spike rate g*|I|*f_clk/2^N with
// the sign of I. The loop obeys dI/dt = f_in - k*I with k = g*f_clk/2^N,
// i.e. a first-order low-pass with unity DC gain and cutoff k/(2*pi).
//
// Hold&Fire: subtracts the rate of b from the rate of a. Spikes of a and of
// inverted b are held; an arriving spike of the opposite sign annihilates
// the oldest held spike. Survivors fire hold_cycles after arrival, at most
// one per core cycle.
//
// SBPF: Hold&Fire(SLPF_high(x), SLPF_low(x)).
//
// Every block has an event-driven implementation (the default) and a
// per-cycle reference (`*_reference`) that steps every core cycle. Both
// must produce identical streams.

#ifndef PDMSPIKES_SSP_HPP
#define PDMSPIKES_SSP_HPP

#include <cstdint>
#include <optional>

#include "pdmspikes/events.hpp"

namespace pdmspikes {

// Phase-accumulator spike generator. For a constant drive v it fires
// floor or ceil of T*g*|v|/2^N spikes in T ticks, and its inter-spike
// intervals take at most two adjacent values.
class SpikeGenerator {
 public:
  static constexpr unsigned kDefaultBits = 20;

  explicit SpikeGenerator(std::uint32_t gain = 1, unsigned n_bits = kDefaultBits);

  // Adds min(g*|drive|, 2^N - 1) to the accumulator; on wrap-around emits a
  // spike with the sign of `drive`. drive == 0 leaves the state untouched.
  std::optional<Polarity> tick(std::int64_t drive);

  std::uint64_t accumulator() const noexcept { return acc_; }
  std::uint32_t gain() const noexcept { return gain_; }
  unsigned n_bits() const noexcept { return n_bits_; }
  std::uint64_t modulus() const noexcept { return std::uint64_t{1} << n_bits_; }
  // Ticks on which g*|drive| had to be clipped to 2^N - 1.
  std::uint64_t saturations() const noexcept { return saturations_; }

 private:
  std::uint64_t acc_ = 0;
  std::uint32_t gain_;
  unsigned n_bits_;
  std::uint64_t saturations_ = 0;
};

struct SlpfParams {
  static constexpr std::int64_t kDefaultIntegratorLimit = (1 << 15) - 1;

  double cutoff_hz = 0.0;  // requested cutoff
  std::uint32_t gain = 1;
  unsigned n_bits = SpikeGenerator::kDefaultBits;
  std::int64_t integrator_limit = kDefaultIntegratorLimit;

  // g * f_clk / (2*pi*2^N)
  double realized_cutoff_hz(std::uint64_t core_clock_hz) const noexcept;
};

// Picks the 8-bit gain g in [1, 255] and width N in [10, 28] minimising the
// relative cutoff error; ties go to the smaller N. Requires
// 1 Hz <= cutoff <= core_clock/100, otherwise ArgumentError.
SlpfParams cutoff_to_params(double cutoff_hz, std::uint64_t core_clock_hz);

struct SlpfStats {
  std::uint64_t integrator_clamps = 0;
  std::uint64_t drive_saturations = 0;
  std::int64_t final_integrator = 0;
};

// Simulates cycles [0, horizon); the horizon defaults to one past the last
// input event. Output spikes go to `out_channel` (addresses 2c+1 / 2c).
SpikeStream slpf_process(const SpikeStream& input, const SlpfParams& params,
                         std::uint32_t out_channel = 0,
                         std::optional<Cycle> horizon = std::nullopt,
                         SlpfStats* stats = nullptr);
SpikeStream slpf_process_reference(const SpikeStream& input,
                                   const SlpfParams& params,
                                   std::uint32_t out_channel = 0,
                                   std::optional<Cycle> horizon = std::nullopt,
                                   SlpfStats* stats = nullptr);

struct HoldAndFireParams {
  Cycle hold_cycles = 16;
};

// Output rate = rate(a) - rate(b). Held spikes are flushed at the end, so
// the output may extend past both inputs by hold_cycles or more.
SpikeStream hold_and_fire(const SpikeStream& a, const SpikeStream& b,
                          const HoldAndFireParams& params,
                          std::uint32_t out_channel = 0);
SpikeStream hold_and_fire_reference(const SpikeStream& a, const SpikeStream& b,
                                    const HoldAndFireParams& params,
                                    std::uint32_t out_channel = 0);

struct SbpfConfig {
  // Hold window the interface's band-pass uses unless configured otherwise.
  static constexpr Cycle kDefaultHoldCycles = 128;

  double f_low_hz = 70.0;
  double f_high_hz = 12'000.0;
  HoldAndFireParams hold{kDefaultHoldCycles};

  // Throws ArgumentError unless 0 < f_low < f_high and hold >= 1.
  void validate() const;
};

SpikeStream sbpf_process(const SpikeStream& input, const SbpfConfig& config,
                         std::uint32_t out_channel = 0);
SpikeStream sbpf_process_reference(const SpikeStream& input,
                                   const SbpfConfig& config,
                                   std::uint32_t out_channel = 0);

}  // namespace pdmspikes

#endif  // PDMSPIKES_SSP_HPP
