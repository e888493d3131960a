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

// Cascade filter bank. Stage 0 filters the front-end spikes, stage i filters
// stage i-1, and channel i is Hold&Fire(stage i, stage i+1): the band
// between the two stage cutoffs f_{i+1} < f < f_i.
//
// Addresses: 2*channel + (positive ? 1 : 0), the right ear offset by
// 2*num_channels.

#ifndef PDMSPIKES_NAS_HPP
#define PDMSPIKES_NAS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pdmspikes/events.hpp"
#include "pdmspikes/ssp.hpp"

namespace pdmspikes {

enum class Ear : std::uint8_t { kLeft = 0, kRight = 1 };

struct NasConfig {
  std::uint32_t num_channels = 64;
  double f_start_hz = 20'000.0;  // highest stage cutoff
  double f_end_hz = 20.0;        // lowest stage cutoff
  bool binaural = false;
  HoldAndFireParams hold{SbpfConfig::kDefaultHoldCycles};
  ClockConfig clock;

  // Throws ArgumentError on an invalid topology.
  void validate() const;

  // f_i = f_start * (f_end/f_start)^(i/C), i = 0..C.
  std::vector<double> stage_cutoffs() const;

  // Geometric centre of channel i's band (f_{i+1}, f_i).
  double band_center_hz(std::uint32_t channel) const;
};

struct NasAddress {
  Ear ear = Ear::kLeft;
  std::uint32_t channel = 0;
  Polarity polarity = Polarity::kPositive;

  friend bool operator==(const NasAddress&, const NasAddress&) = default;
};

class NasAddressMap {
 public:
  NasAddressMap(std::uint32_t num_channels, bool binaural)
      : num_channels_(num_channels), binaural_(binaural) {}

  std::uint32_t size() const noexcept {
    return (binaural_ ? 4u : 2u) * num_channels_;
  }
  std::uint32_t encode(const NasAddress& a) const;
  // Throws FormatError naming the address when it lies outside the map.
  NasAddress decode(std::uint32_t address) const;

 private:
  std::uint32_t num_channels_;
  bool binaural_;
};

class NasBank {
 public:
  const NasConfig& config() const noexcept { return config_; }
  const std::vector<SlpfParams>& stages() const noexcept { return stages_; }
  std::uint32_t num_channels() const noexcept { return config_.num_channels; }
  std::uint32_t num_hold_and_fire_units() const noexcept {
    return config_.num_channels * (config_.binaural ? 2u : 1u);
  }
  NasAddressMap address_map() const {
    return NasAddressMap(config_.num_channels, config_.binaural);
  }

 private:
  friend NasBank build_nas(const NasConfig& config);
  NasConfig config_;
  std::vector<SlpfParams> stages_;
};

// Solves every stage cutoff; throws ConfigError naming the stage that cannot
// be realised. A single-channel bank degenerates to one SBPF(f_end, f_start).
NasBank build_nas(const NasConfig& config);

struct NasRunOptions {
  unsigned threads = 1;  // ears run in parallel when > 1
};

// Front-end spikes per ear in, address-coded channel events out, ordered by
// (t, address). Binaural banks require a right-ear stream.
SpikeStream nas_process(const SpikeStream& left,
                        const std::optional<SpikeStream>& right,
                        const NasBank& bank, const NasRunOptions& options = {});

// One ear, channel addresses 0..2C-1. Exposed for tests and benchmarks.
SpikeStream nas_process_ear(const SpikeStream& input, const NasBank& bank);

}  // namespace pdmspikes

#endif  // PDMSPIKES_NAS_HPP
