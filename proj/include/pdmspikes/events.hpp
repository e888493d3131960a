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

// Clocking, signed spike events and spike streams. Every timestamp inside
// the simulator is an integer count of core-clock cycles.

#ifndef PDMSPIKES_EVENTS_HPP
#define PDMSPIKES_EVENTS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace pdmspikes {

using Cycle = std::uint64_t;

class ClockConfig {
 public:
  static constexpr std::uint64_t kDefaultCoreClockHz = 50'000'000;
  static constexpr std::uint32_t kDefaultPdmDivisor = 16;

  ClockConfig() = default;
  // Throws ArgumentError unless divisor >= 2 and divides the core clock.
  ClockConfig(std::uint64_t core_clock_hz, std::uint32_t pdm_divisor);

  std::uint64_t core_clock_hz() const noexcept { return core_clock_hz_; }
  std::uint32_t pdm_divisor() const noexcept { return pdm_divisor_; }
  std::uint64_t pdm_clock_hz() const noexcept {
    return core_clock_hz_ / pdm_divisor_;
  }

  double cycles_to_seconds(Cycle t) const noexcept {
    return static_cast<double>(t) / static_cast<double>(core_clock_hz_);
  }

  friend bool operator==(const ClockConfig&, const ClockConfig&) = default;

 private:
  std::uint64_t core_clock_hz_ = kDefaultCoreClockHz;
  std::uint32_t pdm_divisor_ = kDefaultPdmDivisor;
};

enum class Polarity : std::int8_t { kNegative = -1, kPositive = +1 };

constexpr int sign_of(Polarity p) noexcept { return static_cast<int>(p); }
constexpr Polarity inverted(Polarity p) noexcept {
  return p == Polarity::kPositive ? Polarity::kNegative : Polarity::kPositive;
}

// Address parity convention: odd addresses carry positive spikes, even ones
// negative. A channel owns the pair (2c, 2c+1).
constexpr std::uint32_t address_of(std::uint32_t channel, Polarity p) noexcept {
  return 2 * channel + (p == Polarity::kPositive ? 1u : 0u);
}
constexpr Polarity polarity_of_address(std::uint32_t address) noexcept {
  return (address & 1u) ? Polarity::kPositive : Polarity::kNegative;
}
constexpr std::uint32_t channel_of_address(std::uint32_t address) noexcept {
  return address / 2;
}

struct SpikeEvent {
  Cycle t = 0;
  std::uint32_t address = 0;
  Polarity polarity = Polarity::kPositive;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

// Time-ordered sequence of spikes sharing one clock. Construction checks
// ordering and (t, address) uniqueness; afterwards the stream is immutable.
class SpikeStream {
 public:
  SpikeStream() = default;
  explicit SpikeStream(ClockConfig clock) : clock_(clock) {}
  // Throws ArgumentError if events are out of order or duplicate a
  // (t, address) pair.
  SpikeStream(std::vector<SpikeEvent> events, ClockConfig clock);

  // Skips validation; for producers that guarantee the invariants by
  // construction (the processing blocks in this library).
  static SpikeStream trusted(std::vector<SpikeEvent> events, ClockConfig clock);

  const ClockConfig& clock() const noexcept { return clock_; }
  std::span<const SpikeEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const SpikeEvent& operator[](std::size_t i) const { return events_[i]; }
  auto begin() const noexcept { return events_.begin(); }
  auto end() const noexcept { return events_.end(); }

  // Timestamp one past the last event, 0 for an empty stream.
  Cycle end_cycle() const noexcept {
    return events_.empty() ? 0 : events_.back().t + 1;
  }

  friend bool operator==(const SpikeStream&, const SpikeStream&) = default;

 private:
  std::vector<SpikeEvent> events_;
  ClockConfig clock_;
};

// Half-open window [begin, end) in core-clock cycles.
struct CycleWindow {
  Cycle begin = 0;
  Cycle end = 0;
  Cycle length() const noexcept { return end > begin ? end - begin : 0; }
};

// Net signed rate in spikes per second over `window`: (#positive - #negative)
// divided by the window length. Throws ArgumentError for an empty window.
double rate_of(const SpikeStream& stream, CycleWindow window);

// Stable timestamp merge; ties keep the order of the argument list. All
// streams must share a clock.
SpikeStream merge(std::span<const SpikeStream* const> streams);

// Rewrites every address as address_of(channel, polarity). The output uses
// the same clock and ordering.
SpikeStream relabel(const SpikeStream& stream, std::uint32_t channel);

// Adds `offset` to every address.
SpikeStream offset_addresses(const SpikeStream& stream, std::uint32_t offset);

}  // namespace pdmspikes

#endif  // PDMSPIKES_EVENTS_HPP
