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

// Run configuration: an INI-style file with [clock], [psi], [nas],
// [analysis] and [io] sections. '#' and ';' start comments.

#ifndef PDMSPIKES_RUN_CONFIG_HPP
#define PDMSPIKES_RUN_CONFIG_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pdmspikes/events.hpp"
#include "pdmspikes/nas.hpp"
#include "pdmspikes/ssp.hpp"

namespace pdmspikes {

struct AnalysisConfig {
  double bin_ms = 20.0;
  double analysis_rate_hz = 100'000.0;
  double full_scale_rate = 0.0;  // 0: pdm_clock_hz
};

struct IoConfig {
  std::string input;  // WAV path, empty when a sine spec is given instead
  std::string output_dir = "out";
  std::vector<std::string> formats{"aer", "csv"};  // subset of {aer, csv}

  bool wants(const std::string& format) const;
};

struct RunConfig {
  ClockConfig clock;
  SbpfConfig psi;
  NasConfig nas;
  AnalysisConfig analysis;
  IoConfig io;

  // Checks every section against the block invariants (cutoffs must be
  // realisable). Throws ConfigError.
  void validate() const;
};

// Unknown sections or keys raise ConfigError naming the key and line.
// `origin` labels messages (usually the file path).
RunConfig parse_run_config(std::istream& in, const std::string& origin = "config");
RunConfig load_run_config(const std::string& path);

}  // namespace pdmspikes

#endif  // PDMSPIKES_RUN_CONFIG_HPP
