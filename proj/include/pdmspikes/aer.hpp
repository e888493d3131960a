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

// Event file formats.
//
// AER: "#!AER-DAT2.0" text header, then one 8-byte record per event:
// big-endian uint32 address followed by big-endian uint32 timestamp in
// microseconds. Timestamps are rounded half up from core-clock cycles and
// wrap modulo 2^32; the reader undoes the wrap assuming time never goes
// backwards.
//
// CSV: header "t_cycles,address,polarity", one row per event, full cycle
// resolution.

#ifndef PDMSPIKES_AER_HPP
#define PDMSPIKES_AER_HPP

#include <cstdint>
#include <iosfwd>

#include "pdmspikes/events.hpp"

namespace pdmspikes {

inline constexpr char kAerHeaderLine[] = "#!AER-DAT2.0";
inline constexpr std::size_t kAerRecordBytes = 8;

// round(t / core_clock_hz * 1e6), ties up, truncated to 32 bits.
std::uint32_t cycles_to_aer_timestamp(Cycle t, const ClockConfig& clock);

// Returns the number of bytes written (header included). Throws IoError with
// the byte offset at which the sink failed.
std::uint64_t write_aer(const SpikeStream& stream, std::ostream& sink);

// Throws FormatError for a bad header, or for a truncated record with the
// index of the incomplete event.
SpikeStream read_aer(std::istream& source, const ClockConfig& clock);

std::uint64_t write_events_csv(const SpikeStream& stream, std::ostream& sink);
SpikeStream read_events_csv(std::istream& source, const ClockConfig& clock);

}  // namespace pdmspikes

#endif  // PDMSPIKES_AER_HPP
