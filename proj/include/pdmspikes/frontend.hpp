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

#ifndef PDMSPIKES_FRONTEND_HPP
#define PDMSPIKES_FRONTEND_HPP

#include <cstdint>

#include "pdmspikes/events.hpp"
#include "pdmspikes/stimulus.hpp"

namespace pdmspikes {

// Raw front-end spikes live on channel 1 (addresses 3/2); the band-pass
// output of the interface uses channel 0 (addresses 1/0).
inline constexpr std::uint32_t kFrontendChannel = 1;
inline constexpr std::uint32_t kSbpfChannel = 0;

// One single-cycle spike per PDM bit: '1' -> positive on address 3, '0' ->
// negative on address 2, at the bit's sampling cycle. The clock divider is
// folded into the timestamp formula.
SpikeStream pdm_to_raw_spikes(const PdmStream& p,
                              std::uint32_t channel = kFrontendChannel);

}  // namespace pdmspikes

#endif  // PDMSPIKES_FRONTEND_HPP
