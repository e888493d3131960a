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

#include "pdmspikes/events.hpp"

#include <algorithm>
#include <string>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {

ClockConfig::ClockConfig(std::uint64_t core_clock_hz, std::uint32_t pdm_divisor)
    : core_clock_hz_(core_clock_hz), pdm_divisor_(pdm_divisor) {
  if (pdm_divisor < 2) {
    throw ArgumentError("pdm_divisor must be >= 2, got " +
                        std::to_string(pdm_divisor));
  }
  if (core_clock_hz == 0 || core_clock_hz % pdm_divisor != 0) {
    throw ArgumentError("core_clock_hz " + std::to_string(core_clock_hz) +
                        " is not a positive multiple of pdm_divisor " +
                        std::to_string(pdm_divisor));
  }
}

namespace {

void validate(std::span<const SpikeEvent> events) {
  // Addresses seen at the current timestamp; typically one or two.
  std::vector<std::uint32_t> at_t;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const SpikeEvent& e = events[i];
    if (e.polarity != Polarity::kPositive && e.polarity != Polarity::kNegative) {
      throw ArgumentError("event " + std::to_string(i) + " has no polarity");
    }
    if (i > 0 && e.t < events[i - 1].t) {
      throw ArgumentError("event " + std::to_string(i) +
                          " timestamp goes backwards");
    }
    if (i == 0 || e.t != events[i - 1].t) at_t.clear();
    if (std::find(at_t.begin(), at_t.end(), e.address) != at_t.end()) {
      throw ArgumentError("event " + std::to_string(i) +
                          " duplicates (t, address) = (" +
                          std::to_string(e.t) + ", " +
                          std::to_string(e.address) + ")");
    }
    at_t.push_back(e.address);
  }
}

}  // namespace

SpikeStream::SpikeStream(std::vector<SpikeEvent> events, ClockConfig clock)
    : events_(std::move(events)), clock_(clock) {
  validate(events_);
}

SpikeStream SpikeStream::trusted(std::vector<SpikeEvent> events,
                                 ClockConfig clock) {
  SpikeStream s(clock);
  s.events_ = std::move(events);
  return s;
}

double rate_of(const SpikeStream& stream, CycleWindow window) {
  if (window.length() == 0) {
    throw ArgumentError("rate_of: empty window");
  }
  auto by_t = [](const SpikeEvent& e, Cycle t) { return e.t < t; };
  auto first = std::lower_bound(stream.begin(), stream.end(), window.begin, by_t);
  auto last = std::lower_bound(first, stream.end(), window.end, by_t);
  std::int64_t net = 0;
  for (auto it = first; it != last; ++it) net += sign_of(it->polarity);
  return static_cast<double>(net) /
         stream.clock().cycles_to_seconds(window.length());
}

SpikeStream merge(std::span<const SpikeStream* const> streams) {
  if (streams.empty()) return SpikeStream();
  const ClockConfig clock = streams.front()->clock();
  std::size_t total = 0;
  for (const SpikeStream* s : streams) {
    if (!(s->clock() == clock)) {
      throw ArgumentError("merge: streams use different clocks");
    }
    total += s->size();
  }
  std::vector<SpikeEvent> out;
  out.reserve(total);
  for (const SpikeStream* s : streams) {
    out.insert(out.end(), s->begin(), s->end());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SpikeEvent& a, const SpikeEvent& b) {
                     return a.t < b.t;
                   });
  return SpikeStream(std::move(out), clock);
}

SpikeStream relabel(const SpikeStream& stream, std::uint32_t channel) {
  std::vector<SpikeEvent> out(stream.begin(), stream.end());
  for (SpikeEvent& e : out) e.address = address_of(channel, e.polarity);
  return SpikeStream(std::move(out), stream.clock());
}

SpikeStream offset_addresses(const SpikeStream& stream, std::uint32_t offset) {
  std::vector<SpikeEvent> out(stream.begin(), stream.end());
  for (SpikeEvent& e : out) e.address += offset;
  return SpikeStream::trusted(std::move(out), stream.clock());
}

}  // namespace pdmspikes
