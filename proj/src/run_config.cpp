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

#include "pdmspikes/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Located {
  std::string origin;
  int line;
  std::string key;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + key + ": " +
                      msg);
  }
};

template <typename T>
T parse_number(const std::string& v, const Located& at) {
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    at.fail("not a valid number: '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v, const Located& at) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  at.fail("not a boolean: '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Located&)>;

// Clock values are staged because ClockConfig validates as a pair.
struct ClockDraft {
  std::uint64_t core = ClockConfig::kDefaultCoreClockHz;
  std::uint32_t divisor = ClockConfig::kDefaultPdmDivisor;
};

}  // namespace

bool IoConfig::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

void RunConfig::validate() const {
  try {
    psi.validate();
    cutoff_to_params(psi.f_low_hz, clock.core_clock_hz());
    cutoff_to_params(psi.f_high_hz, clock.core_clock_hz());
    if (!(nas.clock == clock)) throw ArgumentError("nas clock differs from [clock]");
    build_nas(nas);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(analysis.bin_ms > 0.0)) throw ConfigError("analysis.bin_ms must be > 0");
  if (!(analysis.analysis_rate_hz > 0.0)) {
    throw ConfigError("analysis.analysis_rate_hz must be > 0");
  }
  if (analysis.full_scale_rate < 0.0) {
    throw ConfigError("analysis.full_scale_rate must be >= 0");
  }
  for (const auto& f : io.formats) {
    if (f != "aer" && f != "csv") {
      throw ConfigError("io.formats: unknown format '" + f + "'");
    }
  }
}

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  ClockDraft clock;

  const std::map<std::string, Setter> setters = {
      {"clock.core_clock_hz",
       [&](RunConfig&, const std::string& v, const Located& at) {
         clock.core = parse_number<std::uint64_t>(v, at);
       }},
      {"clock.pdm_divisor",
       [&](RunConfig&, const std::string& v, const Located& at) {
         clock.divisor = parse_number<std::uint32_t>(v, at);
       }},
      {"psi.f_low_hz", [](RunConfig& c, const std::string& v, const Located& at) {
         c.psi.f_low_hz = parse_number<double>(v, at);
       }},
      {"psi.f_high_hz", [](RunConfig& c, const std::string& v, const Located& at) {
         c.psi.f_high_hz = parse_number<double>(v, at);
       }},
      {"psi.hold_cycles", [](RunConfig& c, const std::string& v, const Located& at) {
         c.psi.hold.hold_cycles = parse_number<Cycle>(v, at);
       }},
      {"nas.num_channels", [](RunConfig& c, const std::string& v, const Located& at) {
         c.nas.num_channels = parse_number<std::uint32_t>(v, at);
       }},
      {"nas.f_start_hz", [](RunConfig& c, const std::string& v, const Located& at) {
         c.nas.f_start_hz = parse_number<double>(v, at);
       }},
      {"nas.f_end_hz", [](RunConfig& c, const std::string& v, const Located& at) {
         c.nas.f_end_hz = parse_number<double>(v, at);
       }},
      {"nas.binaural", [](RunConfig& c, const std::string& v, const Located& at) {
         c.nas.binaural = parse_bool(v, at);
       }},
      {"nas.hold_cycles", [](RunConfig& c, const std::string& v, const Located& at) {
         c.nas.hold.hold_cycles = parse_number<Cycle>(v, at);
       }},
      {"analysis.bin_ms", [](RunConfig& c, const std::string& v, const Located& at) {
         c.analysis.bin_ms = parse_number<double>(v, at);
       }},
      {"analysis.analysis_rate_hz",
       [](RunConfig& c, const std::string& v, const Located& at) {
         c.analysis.analysis_rate_hz = parse_number<double>(v, at);
       }},
      {"analysis.full_scale_rate",
       [](RunConfig& c, const std::string& v, const Located& at) {
         c.analysis.full_scale_rate = parse_number<double>(v, at);
       }},
      {"io.input", [](RunConfig& c, const std::string& v, const Located&) {
         c.io.input = v;
       }},
      {"io.output_dir", [](RunConfig& c, const std::string& v, const Located&) {
         c.io.output_dir = v;
       }},
      {"io.formats", [](RunConfig& c, const std::string& v, const Located&) {
         c.io.formats = parse_list(v);
       }},
  };

  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        Located{origin, line_no, line}.fail("unterminated section header");
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Located{origin, line_no, line}.fail("expected key = value");
    }
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Located at{origin, line_no, key};
    const auto it = setters.find(key);
    if (it == setters.end()) at.fail("unknown key");
    it->second(cfg, value, at);
  }

  try {
    cfg.clock = ClockConfig(clock.core, clock.divisor);
  } catch (const Error& e) {
    throw ConfigError(origin + ": clock: " + e.what());
  }
  cfg.nas.clock = cfg.clock;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_run_config(in, path);
}

}  // namespace pdmspikes
