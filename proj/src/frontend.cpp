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

#include "pdmspikes/frontend.hpp"

namespace pdmspikes {

SpikeStream pdm_to_raw_spikes(const PdmStream& p, std::uint32_t channel) {
  std::vector<SpikeEvent> out;
  out.reserve(p.bits.size());
  const std::uint32_t pos = address_of(channel, Polarity::kPositive);
  const std::uint32_t neg = address_of(channel, Polarity::kNegative);
  for (std::size_t i = 0; i < p.bits.size(); ++i) {
    const bool one = p.bits[i] != 0;
    out.push_back({p.cycle_of(i), one ? pos : neg,
                   one ? Polarity::kPositive : Polarity::kNegative});
  }
  return SpikeStream::trusted(std::move(out), p.clock);
}

}  // namespace pdmspikes
