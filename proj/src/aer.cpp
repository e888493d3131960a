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

#include "pdmspikes/aer.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {

namespace {
__extension__ using U128 = unsigned __int128;
}  // namespace

namespace {

constexpr char kAerHeader[] =
    "#!AER-DAT2.0\r\n"
    "# This is a raw AE data file created by pdmspikes\r\n"
    "# Data format is int32 address, int32 timestamp (8 bytes total), "
    "repeated for each event\r\n"
    "# Timestamps tick is 1 us\r\n";

constexpr char kCsvHeader[] = "t_cycles,address,polarity";

void put_be32(std::array<char, kAerRecordBytes>& buf, std::size_t at,
              std::uint32_t v) {
  buf[at + 0] = static_cast<char>((v >> 24) & 0xff);
  buf[at + 1] = static_cast<char>((v >> 16) & 0xff);
  buf[at + 2] = static_cast<char>((v >> 8) & 0xff);
  buf[at + 3] = static_cast<char>(v & 0xff);
}

std::uint32_t get_be32(const std::array<char, kAerRecordBytes>& buf,
                       std::size_t at) {
  auto b = [&](std::size_t k) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[at + k]));
  };
  return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

void checked_write(std::ostream& sink, const char* data, std::size_t n,
                   std::uint64_t offset) {
  sink.write(data, static_cast<std::streamsize>(n));
  if (!sink) {
    throw IoError("write failed at byte offset " + std::to_string(offset),
                  offset);
  }
}

// Events quantized to the same cycle on the same address are pushed forward
// one cycle at a time so the decoded stream keeps (t, address) unique.
class CollisionGuard {
 public:
  Cycle place(Cycle t, std::uint32_t address) {
    if (t < last_t_) t = last_t_;
    if (t != last_t_) at_t_.clear();
    while (contains(address)) {
      ++t;
      at_t_.clear();
    }
    last_t_ = t;
    at_t_.push_back(address);
    return t;
  }

 private:
  bool contains(std::uint32_t a) const {
    for (std::uint32_t x : at_t_) {
      if (x == a) return true;
    }
    return false;
  }
  Cycle last_t_ = 0;
  std::vector<std::uint32_t> at_t_;
};

}  // namespace

std::uint32_t cycles_to_aer_timestamp(Cycle t, const ClockConfig& clock) {
  const U128 f = clock.core_clock_hz();
  const U128 us =
      (static_cast<U128>(t) * 1'000'000u + f / 2) / f;
  return static_cast<std::uint32_t>(us);
}

std::uint64_t write_aer(const SpikeStream& stream, std::ostream& sink) {
  std::uint64_t offset = 0;
  const std::size_t header_len = sizeof(kAerHeader) - 1;
  checked_write(sink, kAerHeader, header_len, offset);
  offset += header_len;
  std::array<char, kAerRecordBytes> rec{};
  for (const SpikeEvent& e : stream) {
    put_be32(rec, 0, e.address);
    put_be32(rec, 4, cycles_to_aer_timestamp(e.t, stream.clock()));
    checked_write(sink, rec.data(), rec.size(), offset);
    offset += rec.size();
  }
  sink.flush();
  if (!sink) throw IoError("flush failed", offset);
  return offset;
}

SpikeStream read_aer(std::istream& source, const ClockConfig& clock) {
  std::string line;
  if (!std::getline(source, line) || line.rfind("#!AER-DAT", 0) != 0) {
    throw FormatError("missing #!AER-DAT header line");
  }
  // Remaining comment lines.
  while (source.peek() == '#') {
    std::getline(source, line);
  }

  std::vector<SpikeEvent> events;
  CollisionGuard guard;
  std::array<char, kAerRecordBytes> rec{};
  std::uint64_t wraps = 0;
  std::uint32_t prev_us = 0;
  const U128 f = clock.core_clock_hz();
  for (std::int64_t index = 0;; ++index) {
    source.read(rec.data(), static_cast<std::streamsize>(rec.size()));
    const auto got = static_cast<std::size_t>(source.gcount());
    if (got == 0) break;
    if (got < rec.size()) {
      throw FormatError("truncated AER record at event " +
                            std::to_string(index) + " (" +
                            std::to_string(got) + " of 8 bytes)",
                        index);
    }
    const std::uint32_t address = get_be32(rec, 0);
    const std::uint32_t us = get_be32(rec, 4);
    if (index > 0 && us < prev_us) ++wraps;
    prev_us = us;
    const U128 total_us =
        (static_cast<U128>(wraps) << 32) | us;
    const auto t = static_cast<Cycle>((total_us * f + 500'000u) / 1'000'000u);
    events.push_back({guard.place(t, address), address,
                      polarity_of_address(address)});
  }
  return SpikeStream(std::move(events), clock);
}

std::uint64_t write_events_csv(const SpikeStream& stream, std::ostream& sink) {
  std::uint64_t offset = 0;
  std::string row = std::string(kCsvHeader) + "\n";
  checked_write(sink, row.data(), row.size(), offset);
  offset += row.size();
  for (const SpikeEvent& e : stream) {
    row = std::to_string(e.t) + "," + std::to_string(e.address) + "," +
          (e.polarity == Polarity::kPositive ? "1" : "-1") + "\n";
    checked_write(sink, row.data(), row.size(), offset);
    offset += row.size();
  }
  sink.flush();
  if (!sink) throw IoError("flush failed", offset);
  return offset;
}

SpikeStream read_events_csv(std::istream& source, const ClockConfig& clock) {
  std::string line;
  if (!std::getline(source, line) || line.rfind(kCsvHeader, 0) != 0) {
    throw FormatError("missing CSV header '" + std::string(kCsvHeader) + "'");
  }
  std::vector<SpikeEvent> events;
  for (std::int64_t index = 0; std::getline(source, line); ++index) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    Cycle t = 0;
    std::uint32_t address = 0;
    int pol = 0;
    auto r1 = std::from_chars(p, end, t);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') {
      throw FormatError("bad t_cycles in CSV row " + std::to_string(index),
                        index);
    }
    auto r2 = std::from_chars(r1.ptr + 1, end, address);
    if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',') {
      throw FormatError("bad address in CSV row " + std::to_string(index),
                        index);
    }
    auto r3 = std::from_chars(r2.ptr + 1, end, pol);
    if (r3.ec != std::errc() || (pol != 1 && pol != -1)) {
      throw FormatError("bad polarity in CSV row " + std::to_string(index),
                        index);
    }
    events.push_back({t, address, static_cast<Polarity>(pol)});
  }
  return SpikeStream(std::move(events), clock);
}

}  // namespace pdmspikes
