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

#include "pdmspikes/ssp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "pdmspikes/errors.hpp"

namespace pdmspikes {

SpikeGenerator::SpikeGenerator(std::uint32_t gain, unsigned n_bits)
    : gain_(gain), n_bits_(n_bits) {
  if (gain == 0) throw ArgumentError("generator gain must be positive");
  if (n_bits == 0 || n_bits > 40) {
    throw ArgumentError("generator width must be in [1, 40] bits");
  }
}

std::optional<Polarity> SpikeGenerator::tick(std::int64_t drive) {
  if (drive == 0) return std::nullopt;
  const std::uint64_t m = modulus();
  const auto mag = static_cast<std::uint64_t>(drive < 0 ? -drive : drive);
  std::uint64_t step;
  if (mag > (m - 1) / gain_) {
    step = m - 1;
    ++saturations_;
  } else {
    step = mag * gain_;
  }
  acc_ += step;
  if (acc_ < m) return std::nullopt;
  acc_ -= m;
  return drive > 0 ? Polarity::kPositive : Polarity::kNegative;
}

double SlpfParams::realized_cutoff_hz(std::uint64_t core_clock_hz) const noexcept {
  return static_cast<double>(gain) * static_cast<double>(core_clock_hz) /
         (2.0 * std::numbers::pi * std::ldexp(1.0, static_cast<int>(n_bits)));
}

SlpfParams cutoff_to_params(double cutoff_hz, std::uint64_t core_clock_hz) {
  const double f_clk = static_cast<double>(core_clock_hz);
  if (!(cutoff_hz >= 1.0) || !(cutoff_hz <= f_clk / 100.0)) {
    throw ArgumentError("cutoff " + std::to_string(cutoff_hz) +
                        " Hz outside [1 Hz, core_clock/100]");
  }
  constexpr unsigned kMinBits = 10;
  constexpr unsigned kMaxBits = 28;
  constexpr std::uint32_t kMaxGain = 255;

  SlpfParams best;
  best.cutoff_hz = cutoff_hz;
  double best_err = std::numeric_limits<double>::infinity();
  for (unsigned n = kMinBits; n <= kMaxBits; ++n) {
    const double ideal =
        cutoff_hz * 2.0 * std::numbers::pi * std::ldexp(1.0, static_cast<int>(n)) / f_clk;
    const auto centre = static_cast<std::int64_t>(std::floor(ideal));
    for (std::int64_t g = centre; g <= centre + 1; ++g) {
      if (g < 1 || g > kMaxGain) continue;
      SlpfParams p = best;
      p.gain = static_cast<std::uint32_t>(g);
      p.n_bits = n;
      const double err =
          std::abs(p.realized_cutoff_hz(core_clock_hz) - cutoff_hz) / cutoff_hz;
      if (err < best_err) {
        best_err = err;
        best = p;
      }
    }
  }
  if (!(best_err <= 0.02)) {
    throw ArgumentError("no (gain, width) pair realises " +
                        std::to_string(cutoff_hz) + " Hz within 2%");
  }
  return best;
}

namespace {

class SlpfCore {
 public:
  SlpfCore(const SlpfParams& p, std::uint32_t out_channel)
      : gain_(p.gain),
        modulus_(std::uint64_t{1} << p.n_bits),
        limit_(p.integrator_limit),
        pos_(address_of(out_channel, Polarity::kPositive)),
        neg_(address_of(out_channel, Polarity::kNegative)) {
    if (p.gain == 0 || p.n_bits == 0 || p.n_bits > 40) {
      throw ArgumentError("invalid SLPF parameters");
    }
    if (p.integrator_limit < 1) {
      throw ArgumentError("SLPF integrator limit must be positive");
    }
  }

  void add_input(Polarity p) {
    integrator_ += sign_of(p);
    if (integrator_ > limit_) {
      integrator_ = limit_;
      ++stats_.integrator_clamps;
    } else if (integrator_ < -limit_) {
      integrator_ = -limit_;
      ++stats_.integrator_clamps;
    }
  }

  // Generator step, 2^N - 1 if clipped.
  std::uint64_t step(bool* saturated) const {
    const auto mag = static_cast<std::uint64_t>(
        integrator_ < 0 ? -integrator_ : integrator_);
    if (mag > (modulus_ - 1) / gain_) {
      *saturated = true;
      return modulus_ - 1;
    }
    *saturated = false;
    return mag * gain_;
  }

  // One core cycle of the generator at cycle t.
  void tick(Cycle t, std::vector<SpikeEvent>& out) {
    if (integrator_ == 0) return;
    bool sat = false;
    acc_ += step(&sat);
    if (sat) ++stats_.drive_saturations;
    if (acc_ >= modulus_) {
      acc_ -= modulus_;
      fire(t, out);
    }
  }

  // Runs the generator over the input-free cycles [from, to).
  void idle(Cycle from, Cycle to, std::vector<SpikeEvent>& out) {
    Cycle c = from;
    while (c < to && integrator_ != 0) {
      bool sat = false;
      const std::uint64_t d = step(&sat);
      // Ticks until the accumulator wraps, counting the wrapping tick.
      const std::uint64_t need = (modulus_ - acc_ + d - 1) / d;
      if (need <= to - c) {
        acc_ = acc_ + need * d - modulus_;
        if (sat) stats_.drive_saturations += need;
        fire(c + need - 1, out);
        c += need;
      } else {
        const std::uint64_t ticks = to - c;
        acc_ += ticks * d;
        if (sat) stats_.drive_saturations += ticks;
        c = to;
      }
    }
  }

  SlpfStats stats() const {
    SlpfStats s = stats_;
    s.final_integrator = integrator_;
    return s;
  }

 private:
  void fire(Cycle t, std::vector<SpikeEvent>& out) {
    const Polarity p = integrator_ > 0 ? Polarity::kPositive : Polarity::kNegative;
    out.push_back({t, p == Polarity::kPositive ? pos_ : neg_, p});
    integrator_ -= sign_of(p);
  }

  std::uint64_t gain_;
  std::uint64_t modulus_;
  std::int64_t limit_;
  std::uint32_t pos_;
  std::uint32_t neg_;
  std::int64_t integrator_ = 0;
  std::uint64_t acc_ = 0;
  SlpfStats stats_;
};

}  // namespace

SpikeStream slpf_process(const SpikeStream& input, const SlpfParams& params,
                         std::uint32_t out_channel, std::optional<Cycle> horizon,
                         SlpfStats* stats) {
  SlpfCore core(params, out_channel);
  const Cycle end = horizon.value_or(input.end_cycle());
  std::vector<SpikeEvent> out;
  out.reserve(input.size());
  const auto events = input.events();
  std::size_t i = 0;
  Cycle c = 0;
  while (c < end) {
    const Cycle next = i < events.size() ? std::min(events[i].t, end) : end;
    core.idle(c, next, out);
    c = next;
    if (c >= end) break;
    while (i < events.size() && events[i].t == c) core.add_input(events[i++].polarity);
    core.tick(c, out);
    ++c;
  }
  if (stats) *stats = core.stats();
  return SpikeStream::trusted(std::move(out), input.clock());
}

SpikeStream slpf_process_reference(const SpikeStream& input,
                                   const SlpfParams& params,
                                   std::uint32_t out_channel,
                                   std::optional<Cycle> horizon,
                                   SlpfStats* stats) {
  SlpfCore core(params, out_channel);
  const Cycle end = horizon.value_or(input.end_cycle());
  std::vector<SpikeEvent> out;
  const auto events = input.events();
  std::size_t i = 0;
  for (Cycle c = 0; c < end; ++c) {
    while (i < events.size() && events[i].t == c) core.add_input(events[i++].polarity);
    core.tick(c, out);
  }
  if (stats) *stats = core.stats();
  return SpikeStream::trusted(std::move(out), input.clock());
}

namespace {

void check_hold(const HoldAndFireParams& params) {
  if (params.hold_cycles < 1) {
    throw ArgumentError("hold_cycles must be >= 1");
  }
}

// Arrivals in processing order: at equal timestamps every spike of a comes
// before any spike of b; b's polarities are inverted.
template <typename Fn>
void for_each_arrival(const SpikeStream& a, const SpikeStream& b, Fn&& fn) {
  auto ea = a.events();
  auto eb = b.events();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j >= eb.size() || (i < ea.size() && ea[i].t <= eb[j].t)) {
      fn(ea[i].t, ea[i].polarity);
      ++i;
    } else {
      fn(eb[j].t, inverted(eb[j].polarity));
      ++j;
    }
  }
}

}  // namespace

SpikeStream hold_and_fire(const SpikeStream& a, const SpikeStream& b,
                          const HoldAndFireParams& params,
                          std::uint32_t out_channel) {
  check_hold(params);
  if (!(a.clock() == b.clock())) {
    throw ArgumentError("hold_and_fire: inputs use different clocks");
  }
  const Cycle hold = params.hold_cycles;
  const std::uint32_t pos = address_of(out_channel, Polarity::kPositive);
  const std::uint32_t neg = address_of(out_channel, Polarity::kNegative);

  std::vector<SpikeEvent> out;
  out.reserve(std::max(a.size(), b.size()));
  std::deque<Cycle> held;
  Polarity held_pol = Polarity::kPositive;
  bool fired_any = false;
  Cycle last_fire = 0;

  auto fire_until = [&](Cycle t) {
    while (!held.empty()) {
      Cycle ft = held.front() + hold;
      if (fired_any) ft = std::max(ft, last_fire + 1);
      if (ft > t) return;
      out.push_back({ft, held_pol == Polarity::kPositive ? pos : neg, held_pol});
      last_fire = ft;
      fired_any = true;
      held.pop_front();
    }
  };

  for_each_arrival(a, b, [&](Cycle t, Polarity p) {
    fire_until(t);
    if (!held.empty() && held_pol != p) {
      held.pop_front();
    } else {
      held.push_back(t);
      held_pol = p;
    }
  });
  fire_until(std::numeric_limits<Cycle>::max());
  return SpikeStream::trusted(std::move(out), a.clock());
}

SpikeStream hold_and_fire_reference(const SpikeStream& a, const SpikeStream& b,
                                    const HoldAndFireParams& params,
                                    std::uint32_t out_channel) {
  check_hold(params);
  if (!(a.clock() == b.clock())) {
    throw ArgumentError("hold_and_fire: inputs use different clocks");
  }
  const Cycle hold = params.hold_cycles;
  const std::uint32_t pos = address_of(out_channel, Polarity::kPositive);
  const std::uint32_t neg = address_of(out_channel, Polarity::kNegative);

  std::vector<SpikeEvent> out;
  std::deque<Cycle> held;
  Polarity held_pol = Polarity::kPositive;
  auto ea = a.events();
  auto eb = b.events();
  std::size_t i = 0;
  std::size_t j = 0;

  auto arrive = [&](Polarity p, Cycle c) {
    if (!held.empty() && held_pol != p) {
      held.pop_front();
    } else {
      held.push_back(c);
      held_pol = p;
    }
  };

  for (Cycle c = 0; i < ea.size() || j < eb.size() || !held.empty(); ++c) {
    // Fire first: a spike is held over [arrival, arrival + hold).
    if (!held.empty() && held.front() + hold <= c) {
      out.push_back({c, held_pol == Polarity::kPositive ? pos : neg, held_pol});
      held.pop_front();
    }
    while (i < ea.size() && ea[i].t == c) arrive(ea[i++].polarity, c);
    while (j < eb.size() && eb[j].t == c) arrive(inverted(eb[j++].polarity), c);
  }
  return SpikeStream::trusted(std::move(out), a.clock());
}

void SbpfConfig::validate() const {
  if (!(f_low_hz > 0.0) || !(f_low_hz < f_high_hz)) {
    throw ArgumentError("SBPF needs 0 < f_low < f_high (got " +
                        std::to_string(f_low_hz) + ", " +
                        std::to_string(f_high_hz) + ")");
  }
  check_hold(hold);
}

SpikeStream sbpf_process(const SpikeStream& input, const SbpfConfig& config,
                         std::uint32_t out_channel) {
  config.validate();
  const auto f_clk = input.clock().core_clock_hz();
  const SpikeStream high = slpf_process(input, cutoff_to_params(config.f_high_hz, f_clk));
  const SpikeStream low = slpf_process(input, cutoff_to_params(config.f_low_hz, f_clk));
  return hold_and_fire(high, low, config.hold, out_channel);
}

SpikeStream sbpf_process_reference(const SpikeStream& input,
                                   const SbpfConfig& config,
                                   std::uint32_t out_channel) {
  config.validate();
  const auto f_clk = input.clock().core_clock_hz();
  const SpikeStream high =
      slpf_process_reference(input, cutoff_to_params(config.f_high_hz, f_clk));
  const SpikeStream low =
      slpf_process_reference(input, cutoff_to_params(config.f_low_hz, f_clk));
  return hold_and_fire_reference(high, low, config.hold, out_channel);
}

}  // namespace pdmspikes
