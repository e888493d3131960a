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

#include "pdmspikes/stimulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {

namespace {
__extension__ using U128 = unsigned __int128;
}  // namespace

Waveform::Waveform(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw ArgumentError("sample rate must be positive");
  }
  for (double& s : samples_) {
    if (std::isnan(s)) s = 0.0;
    s = std::clamp(s, -1.0, 1.0);
  }
}

Waveform synth_sine(double freq_hz, double amplitude, double duration_s,
                    double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) {
    throw ArgumentError("sample rate must be positive");
  }
  if (!(freq_hz > 0.0) || freq_hz >= sample_rate_hz / 2.0) {
    throw ArgumentError("tone frequency " + std::to_string(freq_hz) +
                        " Hz is not below Nyquist (" +
                        std::to_string(sample_rate_hz / 2.0) + " Hz)");
  }
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
    throw ArgumentError("amplitude must lie in [0, 1]");
  }
  if (!(duration_s > 0.0)) {
    throw ArgumentError("duration must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  std::vector<double> s(n);
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = amplitude * std::sin(w * static_cast<double>(i));
  }
  return Waveform(std::move(s), sample_rate_hz);
}

namespace {

std::uint32_t le32(const char* p) {
  auto b = [&](int k) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(p[k]));
  };
  return b(0) | (b(1) << 8) | (b(2) << 16) | (b(3) << 24);
}

std::uint16_t le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    (static_cast<unsigned char>(p[1]) << 8));
}

std::string format_tag_name(std::uint16_t tag) {
  switch (tag) {
    case 0x0001: return "1 (PCM)";
    case 0x0003: return "3 (IEEE float)";
    case 0x0006: return "6 (A-law)";
    case 0x0007: return "7 (mu-law)";
    case 0xFFFE: return "0xFFFE (extensible)";
    default: return std::to_string(tag);
  }
}

void read_exact(std::istream& in, char* buf, std::size_t n, const char* what) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string("truncated WAV: ") + what);
  }
}

}  // namespace

std::vector<Waveform> load_wav(std::istream& source) {
  std::array<char, 12> riff{};
  read_exact(source, riff.data(), riff.size(), "RIFF header");
  if (std::string(riff.data(), 4) != "RIFF" ||
      std::string(riff.data() + 8, 4) != "WAVE") {
    throw FormatError("not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::uint16_t block_align = 0;
  for (;;) {
    std::array<char, 8> hdr{};
    read_exact(source, hdr.data(), hdr.size(), "chunk header");
    const std::string id(hdr.data(), 4);
    const std::uint32_t size = le32(hdr.data() + 4);
    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk too short");
      std::vector<char> fmt(size);
      read_exact(source, fmt.data(), size, "fmt chunk");
      std::uint16_t tag = le16(fmt.data());
      if (tag == 0xFFFE && size >= 26) {
        // WAVE_FORMAT_EXTENSIBLE: the sub-format GUID starts at byte 24.
        const std::uint16_t sub = le16(fmt.data() + 24);
        if (sub != 0x0001) {
          throw FormatError("unsupported WAV encoding: format tag " +
                            format_tag_name(tag) + ", sub-format " +
                            std::to_string(sub));
        }
        tag = 0x0001;
      }
      if (tag != 0x0001) {
        throw FormatError("unsupported WAV encoding: format tag " +
                          format_tag_name(tag));
      }
      channels = le16(fmt.data() + 2);
      rate = le32(fmt.data() + 4);
      block_align = le16(fmt.data() + 12);
      bits = le16(fmt.data() + 14);
      if (bits != 16) {
        throw FormatError("unsupported WAV encoding: " + std::to_string(bits) +
                          "-bit PCM (need 16-bit)");
      }
      if (channels != 1 && channels != 2) {
        throw FormatError("unsupported WAV channel count " +
                          std::to_string(channels));
      }
      if (rate == 0 || block_align != 2 * channels) {
        throw FormatError("inconsistent WAV fmt chunk");
      }
      if (size & 1u) source.ignore(1);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("WAV data chunk before fmt chunk");
      const std::size_t frames = size / block_align;
      std::vector<char> raw(frames * block_align);
      read_exact(source, raw.data(), raw.size(), "data chunk");
      std::vector<std::vector<double>> ch(channels, std::vector<double>(frames));
      for (std::size_t f = 0; f < frames; ++f) {
        for (std::size_t c = 0; c < channels; ++c) {
          const auto v = static_cast<std::int16_t>(
              le16(raw.data() + f * block_align + 2 * c));
          ch[c][f] = static_cast<double>(v) / 32768.0;
        }
      }
      std::vector<Waveform> out;
      for (auto& c : ch) out.emplace_back(std::move(c), static_cast<double>(rate));
      return out;
    } else {
      source.ignore(static_cast<std::streamsize>(size + (size & 1u)));
      if (!source) throw FormatError("truncated WAV chunk '" + id + "'");
    }
  }
}

void write_wav(std::ostream& sink, const std::vector<Waveform>& channels) {
  if (channels.empty() || channels.size() > 2) {
    throw ArgumentError("write_wav: need one or two channels");
  }
  const std::size_t frames = channels.front().size();
  const double rate = channels.front().sample_rate_hz();
  for (const Waveform& w : channels) {
    if (w.size() != frames || w.sample_rate_hz() != rate) {
      throw ArgumentError("write_wav: channels differ in length or rate");
    }
  }
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * 2 * nch);
  std::string out;
  auto put32 = [&](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
  };
  out += "RIFF";
  put32(36 + data_bytes);
  out += "WAVEfmt ";
  put32(16);
  put16(1);
  put16(nch);
  put32(static_cast<std::uint32_t>(std::lround(rate)));
  put32(static_cast<std::uint32_t>(std::lround(rate)) * 2u * nch);
  put16(static_cast<std::uint16_t>(2 * nch));
  put16(16);
  out += "data";
  put32(data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const Waveform& w : channels) {
      const double v = std::round(w.samples()[f] * 32768.0);
      put16(static_cast<std::uint16_t>(
          static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0))));
    }
  }
  sink.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!sink) throw IoError("write_wav: write failed", 0);
}

Waveform resample_zoh(const Waveform& w, double target_rate_hz) {
  const double in_rate = w.sample_rate_hz();
  if (!(target_rate_hz >= in_rate)) {
    throw ArgumentError("resample_zoh only upsamples (" +
                        std::to_string(in_rate) + " Hz -> " +
                        std::to_string(target_rate_hz) + " Hz)");
  }
  const auto n_in = w.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * target_rate_hz / in_rate));
  std::vector<double> out(n_out);
  const bool integral = in_rate == std::floor(in_rate) &&
                        target_rate_hz == std::floor(target_rate_hz);
  const auto in_i = static_cast<std::uint64_t>(in_rate);
  const auto tgt_i = static_cast<std::uint64_t>(target_rate_hz);
  for (std::size_t j = 0; j < n_out; ++j) {
    std::size_t k;
    if (integral) {
      k = static_cast<std::size_t>(
          static_cast<U128>(j) * in_i / tgt_i);
    } else {
      k = static_cast<std::size_t>(std::floor(
          static_cast<long double>(j) * in_rate / target_rate_hz));
    }
    out[j] = w.samples()[std::min(k, n_in - 1)];
  }
  return Waveform(std::move(out), target_rate_hz);
}

PdmStream sigma_delta_modulate(const Waveform& w, const ClockConfig& clock,
                               SigmaDeltaState* final_state) {
  if (w.sample_rate_hz() != static_cast<double>(clock.pdm_clock_hz())) {
    throw ArgumentError("modulator input must be sampled at the PDM clock (" +
                        std::to_string(clock.pdm_clock_hz()) + " Hz), got " +
                        std::to_string(w.sample_rate_hz()) + " Hz");
  }
  PdmStream p;
  p.clock = clock;
  p.bits.resize(w.size());
  double s1 = 0.0;
  double s2 = 0.0;
  double peak = 0.0;
  const auto& x = w.samples();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] + 2.0 * s1 - s2;
    const bool bit = u >= 0.0;
    p.bits[i] = bit ? 1 : 0;
    s2 = s1;
    s1 = u - (bit ? 1.0 : -1.0);
    peak = std::max(peak, std::abs(s1));
  }
  // s2 is s1 delayed by one sample, so it shares the peak.
  if (final_state) *final_state = {s1, s2, peak, peak};
  return p;
}

}  // namespace pdmspikes
