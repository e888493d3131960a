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

#include "pdmspikes/nas.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {

void NasConfig::validate() const {
  if (num_channels < 1) throw ArgumentError("num_channels must be >= 1");
  if (!(f_end_hz > 0.0) || !(f_end_hz < f_start_hz)) {
    throw ArgumentError("NAS needs 0 < f_end_hz < f_start_hz");
  }
  if (hold.hold_cycles < 1) throw ArgumentError("hold_cycles must be >= 1");
}

std::vector<double> NasConfig::stage_cutoffs() const {
  std::vector<double> f(num_channels + 1);
  const double ratio = f_end_hz / f_start_hz;
  for (std::uint32_t i = 0; i <= num_channels; ++i) {
    f[i] = f_start_hz * std::pow(ratio, static_cast<double>(i) / num_channels);
  }
  f.front() = f_start_hz;
  f.back() = f_end_hz;
  return f;
}

double NasConfig::band_center_hz(std::uint32_t channel) const {
  const auto f = stage_cutoffs();
  return std::sqrt(f.at(channel) * f.at(channel + 1));
}

std::uint32_t NasAddressMap::encode(const NasAddress& a) const {
  const std::uint32_t ear_offset =
      a.ear == Ear::kRight ? 2 * num_channels_ : 0;
  return ear_offset + address_of(a.channel, a.polarity);
}

NasAddress NasAddressMap::decode(std::uint32_t address) const {
  if (address >= size()) {
    throw FormatError("address " + std::to_string(address) +
                          " outside NAS address space [0, " +
                          std::to_string(size()) + ")",
                      address);
  }
  NasAddress out;
  std::uint32_t local = address;
  if (local >= 2 * num_channels_) {
    out.ear = Ear::kRight;
    local -= 2 * num_channels_;
  }
  out.channel = channel_of_address(local);
  out.polarity = polarity_of_address(local);
  return out;
}

NasBank build_nas(const NasConfig& config) {
  config.validate();
  NasBank bank;
  bank.config_ = config;
  const auto cutoffs = config.stage_cutoffs();
  bank.stages_.reserve(cutoffs.size());
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    try {
      bank.stages_.push_back(
          cutoff_to_params(cutoffs[i], config.clock.core_clock_hz()));
    } catch (const ArgumentError& e) {
      throw ConfigError("NAS stage " + std::to_string(i) + " (" +
                        std::to_string(cutoffs[i]) + " Hz): " + e.what());
    }
  }
  return bank;
}

SpikeStream nas_process_ear(const SpikeStream& input, const NasBank& bank) {
  const Cycle horizon = input.end_cycle();
  const auto& stages = bank.stages();
  const HoldAndFireParams hold = bank.config().hold;
  std::vector<SpikeEvent> all;

  if (bank.num_channels() == 1) {
    // Degenerate bank: both stages read the input, i.e. a plain SBPF.
    const SpikeStream hi = slpf_process(input, stages[0], 0, horizon);
    const SpikeStream lo = slpf_process(input, stages[1], 0, horizon);
    return hold_and_fire(hi, lo, hold, 0);
  }

  SpikeStream upper = slpf_process(input, stages[0], 0, horizon);
  for (std::uint32_t ch = 0; ch < bank.num_channels(); ++ch) {
    SpikeStream lower = slpf_process(upper, stages[ch + 1], 0, horizon);
    const SpikeStream band = hold_and_fire(upper, lower, hold, ch);
    all.insert(all.end(), band.begin(), band.end());
    upper = std::move(lower);
  }
  std::sort(all.begin(), all.end(), [](const SpikeEvent& a, const SpikeEvent& b) {
    return a.t != b.t ? a.t < b.t : a.address < b.address;
  });
  return SpikeStream::trusted(std::move(all), input.clock());
}

SpikeStream nas_process(const SpikeStream& left,
                        const std::optional<SpikeStream>& right,
                        const NasBank& bank, const NasRunOptions& options) {
  const bool binaural = bank.config().binaural;
  if (binaural && !right) {
    throw ArgumentError("binaural NAS needs a right-ear stream");
  }
  if (!binaural && right) {
    throw ArgumentError("monaural NAS given a right-ear stream");
  }
  if (!(left.clock() == bank.config().clock)) {
    throw ArgumentError("input clock differs from the NAS clock");
  }
  if (!binaural) return nas_process_ear(left, bank);
  if (!(right->clock() == bank.config().clock)) {
    throw ArgumentError("input clock differs from the NAS clock");
  }

  SpikeStream l;
  SpikeStream r;
  if (options.threads > 1) {
    auto fut = std::async(std::launch::async,
                          [&] { return nas_process_ear(*right, bank); });
    l = nas_process_ear(left, bank);
    r = fut.get();
  } else {
    l = nas_process_ear(left, bank);
    r = nas_process_ear(*right, bank);
  }
  r = offset_addresses(r, 2 * bank.num_channels());

  std::vector<SpikeEvent> all;
  all.reserve(l.size() + r.size());
  std::merge(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(all),
             [](const SpikeEvent& a, const SpikeEvent& b) {
               return a.t != b.t ? a.t < b.t : a.address < b.address;
             });
  return SpikeStream::trusted(std::move(all), left.clock());
}

}  // namespace pdmspikes
