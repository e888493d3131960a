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

#include "pdmspikes/analysis.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "pdmspikes/errors.hpp"
#include "pdmspikes/frontend.hpp"
#include "pdmspikes/stimulus.hpp"

namespace pdmspikes {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quadratic B-spline on [-1.5, 1.5] and its running integral.
double bspline2(double x) {
  const double a = std::abs(x);
  if (a <= 0.5) return 0.75 - a * a;
  if (a < 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
  return 0.0;
}

double bspline2_cdf(double x) {
  if (x <= -1.5) return 0.0;
  if (x >= 1.5) return 1.0;
  if (x <= -0.5) return (x + 1.5) * (x + 1.5) * (x + 1.5) / 6.0;
  if (x <= 0.5) {
    return 1.0 / 6.0 + 0.75 * (x + 0.5) - (x * x * x + 0.125) / 3.0;
  }
  const double r = 1.5 - x;
  return 1.0 - r * r * r / 6.0;
}

double resolve_full_scale(double full_scale, const ClockConfig& clock) {
  return full_scale > 0.0 ? full_scale
                          : static_cast<double>(clock.pdm_clock_hz());
}

// FFTW's planner is not re-entrant.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct Spectrum {
  std::vector<double> power;
  double bin_hz = 0.0;

  double neighbourhood(std::int64_t centre) const {
    double sum = 0.0;
    const auto n = static_cast<std::int64_t>(power.size());
    for (std::int64_t b = std::max<std::int64_t>(0, centre - 2);
         b <= std::min(n - 1, centre + 2); ++b) {
      sum += power[b];
    }
    return sum;
  }
};

Spectrum hann_power(const std::vector<double>& x, double rate_hz) {
  const std::size_t n = x.size();
  const std::size_t bins = n / 2 + 1;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(bins);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) /
                                          static_cast<double>(n));
    in[i] = x[i] * w;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out,
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  Spectrum s;
  s.power.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    s.power[b] = out[b][0] * out[b][0] + out[b][1] * out[b][1];
  }
  s.bin_hz = rate_hz / static_cast<double>(n);
  fftw_free(in);
  fftw_free(out);
  return s;
}

void check_spectral_pre(const ReconstructedWaveform& w, double f0_hz,
                        unsigned n_harmonics) {
  if (!(f0_hz > 0.0)) throw ArgumentError("f0 must be positive");
  if (w.sample_rate_hz <= 0.0 || w.samples.empty()) {
    throw ArgumentError("empty waveform");
  }
  const double periods =
      static_cast<double>(w.samples.size()) / w.sample_rate_hz * f0_hz;
  if (periods < 10.0) {
    throw ArgumentError("waveform holds fewer than 10 periods of f0");
  }
  if (f0_hz * (n_harmonics + 1) >= w.sample_rate_hz / 2.0) {
    throw ArgumentError("highest harmonic is above the analysis Nyquist");
  }
}

bool peak_is_elsewhere(const Spectrum& s, std::int64_t f0_bin) {
  if (s.power.size() <= 3) return true;
  const auto it = std::max_element(s.power.begin() + 3, s.power.end());
  const auto peak = static_cast<std::int64_t>(it - s.power.begin());
  return std::abs(peak - f0_bin) > 2;
}

// Hann-weighted DFT at an arbitrary frequency over samples [n0, n1).
std::complex<double> tone_dft(const std::vector<double>& x, std::size_t n0,
                              std::size_t n1, double f_hz, double rate_hz) {
  std::complex<double> acc{0.0, 0.0};
  const double len = static_cast<double>(n1 - n0);
  for (std::size_t n = n0; n < n1; ++n) {
    const double w =
        0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(n - n0) / len);
    const double ph = -kTwoPi * f_hz * static_cast<double>(n) / rate_hz;
    acc += w * x[n] * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return acc;
}

BodePoint bode_point(const SpikeSystem& system, double f,
                     const BodeSettings& s) {
  const double settle = std::max(s.settle_periods / f, s.min_settle_s);
  const double periods =
      std::max(s.measure_periods, std::ceil(s.min_measure_s * f));
  const double measure = periods / f;
  const double pdm_rate = static_cast<double>(s.clock.pdm_clock_hz());

  const Waveform tone = synth_sine(f, s.amplitude, settle + measure, pdm_rate);
  const PdmStream pdm = sigma_delta_modulate(tone, s.clock);
  const SpikeStream reference = pdm_to_raw_spikes(pdm);
  const SpikeStream output = system(reference);
  const Cycle horizon = pdm.cycle_of(pdm.bits.size());

  BodePoint p;
  p.freq_hz = f;
  if (output.empty()) {
    p.gain_db = -std::numeric_limits<double>::infinity();
    p.phase_rad = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  const auto ref = reconstruct_from_isi(reference, s.analysis_rate_hz,
                                        s.full_scale_rate, horizon);
  const auto out = reconstruct_from_isi(output, s.analysis_rate_hz,
                                        s.full_scale_rate, horizon);
  const std::size_t n0 =
      static_cast<std::size_t>(std::ceil(settle * s.analysis_rate_hz));
  const std::size_t n1 = std::min(
      ref.samples.size(),
      n0 + static_cast<std::size_t>(std::llround(measure * s.analysis_rate_hz)));
  if (n1 <= n0 + 2) throw ArgumentError("measurement window too short");

  const auto xr = tone_dft(ref.samples, n0, n1, f, s.analysis_rate_hz);
  const auto xo = tone_dft(out.samples, n0, n1, f, s.analysis_rate_hz);
  if (std::abs(xo) == 0.0) {
    p.gain_db = -std::numeric_limits<double>::infinity();
    p.phase_rad = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  const auto ratio = xo / xr;
  p.gain_db = 20.0 * std::log10(std::abs(ratio));
  p.phase_rad = std::arg(ratio);
  return p;
}

}  // namespace

ReconstructedWaveform reconstruct_from_isi(const SpikeStream& s,
                                           double analysis_rate_hz,
                                           double full_scale_rate,
                                           std::optional<Cycle> horizon) {
  if (s.empty()) throw ArgumentError("cannot reconstruct an empty stream");
  if (!(analysis_rate_hz > 0.0)) {
    throw ArgumentError("analysis rate must be positive");
  }
  const double f_clk = static_cast<double>(s.clock().core_clock_hz());
  const double fs = resolve_full_scale(full_scale_rate, s.clock());
  const Cycle end = horizon.value_or(s.end_cycle());
  const auto n_samples = static_cast<std::size_t>(
      std::floor(static_cast<double>(end) / f_clk * analysis_rate_hz));

  ReconstructedWaveform w;
  w.sample_rate_hz = analysis_rate_hz;
  w.samples.assign(n_samples, 0.0);
  if (n_samples == 0) return w;
  const double cells_per_cycle = analysis_rate_hz / f_clk;
  const auto last = static_cast<std::int64_t>(n_samples) - 1;

  for (std::size_t k = 1; k < s.size(); ++k) {
    const Cycle ta = s[k - 1].t;
    const Cycle tb = s[k].t;
    const double p = sign_of(s[k].polarity);
    const double xa = static_cast<double>(ta) * cells_per_cycle;
    const double xb = static_cast<double>(tb) * cells_per_cycle;
    const auto lo = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::ceil(xa - 1.5)));
    const auto hi = std::min<std::int64_t>(
        last, static_cast<std::int64_t>(std::floor(xb + 1.5)));
    if (tb == ta) {
      const double mass = p / fs * analysis_rate_hz;
      for (std::int64_t n = lo; n <= hi; ++n) {
        w.samples[n] += mass * bspline2(xb - static_cast<double>(n));
      }
      continue;
    }
    const double v = p * f_clk / (static_cast<double>(tb - ta) * fs);
    for (std::int64_t n = lo; n <= hi; ++n) {
      const double c = static_cast<double>(n);
      w.samples[n] += v * (bspline2_cdf(xb - c) - bspline2_cdf(xa - c));
    }
  }
  for (double& x : w.samples) {
    if (x > 1.0 || x < -1.0) {
      x = std::clamp(x, -1.0, 1.0);
      ++w.clamped;
    }
  }
  return w;
}

std::uint64_t count_zero_crossings(const SpikeStream& s) {
  std::uint64_t n = 0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].polarity != s[k - 1].polarity) ++n;
  }
  return n;
}

SpikeStream select_channel(const SpikeStream& s, std::uint32_t channel) {
  std::vector<SpikeEvent> out;
  for (const auto& e : s) {
    if (channel_of_address(e.address) == channel) out.push_back(e);
  }
  return SpikeStream::trusted(std::move(out), s.clock());
}

SpectralMeasurement measure_thd(const ReconstructedWaveform& w, double f0_hz,
                                unsigned n_harmonics) {
  check_spectral_pre(w, f0_hz, n_harmonics);
  const Spectrum s = hann_power(w.samples, w.sample_rate_hz);
  const auto b1 = static_cast<std::int64_t>(std::llround(f0_hz / s.bin_hz));
  const double p1 = s.neighbourhood(b1);
  double ph = 0.0;
  for (unsigned h = 2; h <= n_harmonics + 1; ++h) {
    ph += s.neighbourhood(static_cast<std::int64_t>(
        std::llround(h * f0_hz / s.bin_hz)));
  }
  SpectralMeasurement m;
  m.f0_not_peak = peak_is_elsewhere(s, b1);
  m.db = 10.0 * std::log10(ph / p1);
  return m;
}

SpectralMeasurement measure_snr(const ReconstructedWaveform& w, double f0_hz,
                                unsigned n_harmonics, double band_hz) {
  check_spectral_pre(w, f0_hz, n_harmonics);
  const Spectrum s = hann_power(w.samples, w.sample_rate_hz);
  const auto nbins = static_cast<std::int64_t>(s.power.size());
  const auto b1 = static_cast<std::int64_t>(std::llround(f0_hz / s.bin_hz));
  const auto band = std::min<std::int64_t>(
      nbins - 1, static_cast<std::int64_t>(std::floor(band_hz / s.bin_hz)));

  std::vector<bool> excluded(static_cast<std::size_t>(nbins), false);
  for (std::int64_t b = 0; b <= std::min<std::int64_t>(2, nbins - 1); ++b) {
    excluded[b] = true;
  }
  for (unsigned h = 1; h <= n_harmonics + 1; ++h) {
    const auto c =
        static_cast<std::int64_t>(std::llround(h * f0_hz / s.bin_hz));
    for (std::int64_t b = c - 2; b <= c + 2; ++b) {
      if (b >= 0 && b < nbins) excluded[b] = true;
    }
  }
  double noise = 0.0;
  for (std::int64_t b = 0; b <= band; ++b) {
    if (!excluded[b]) noise += s.power[b];
  }
  SpectralMeasurement m;
  m.f0_not_peak = peak_is_elsewhere(s, b1);
  m.db = noise > 0.0 ? 10.0 * std::log10(s.neighbourhood(b1) / noise)
                     : std::numeric_limits<double>::infinity();
  return m;
}

std::vector<BodePoint> bode_sweep(const SpikeSystem& system,
                                  const std::vector<double>& freqs,
                                  const BodeSettings& settings) {
  if (!(settings.amplitude > 0.0 && settings.amplitude <= 1.0)) {
    throw ArgumentError("sweep amplitude must lie in (0, 1]");
  }
  for (double f : freqs) {
    if (!(f > 0.0 && f <= 20'000.0)) {
      throw ArgumentError("sweep frequency outside (0, 20 kHz]: " +
                          format_number(f));
    }
    if (2.0 * f >= settings.analysis_rate_hz) {
      throw ArgumentError("sweep frequency above the analysis Nyquist");
    }
  }

  std::vector<BodePoint> points(freqs.size());
  const unsigned workers = std::max(
      1u, std::min<unsigned>(settings.threads,
                             static_cast<unsigned>(freqs.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned id) {
    try {
      for (std::size_t i = next++; i < freqs.size(); i = next++) {
        points[i] = bode_point(system, freqs[i], settings);
      }
    } catch (...) {
      errors[id] = std::current_exception();
      next = freqs.size();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Unwrap in sweep order; silent points keep NaN and are skipped.
  std::optional<double> prev;
  for (auto& p : points) {
    if (std::isnan(p.phase_rad)) continue;
    if (prev) {
      p.phase_rad += kTwoPi * std::round((*prev - p.phase_rad) / kTwoPi);
    }
    prev = p.phase_rad;
  }
  return points;
}

std::vector<double> log_spaced_frequencies(double f_min, double f_max,
                                           unsigned points_per_decade) {
  if (!(f_min > 0.0 && f_max > f_min) || points_per_decade == 0) {
    throw ArgumentError("need 0 < f_min < f_max and points_per_decade >= 1");
  }
  const double decades = std::log10(f_max / f_min);
  const auto steps = static_cast<std::size_t>(
      std::max(1.0, std::round(decades * points_per_decade)));
  std::vector<double> f(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    f[i] = f_min * std::pow(f_max / f_min, static_cast<double>(i) / steps);
  }
  f.back() = f_max;
  return f;
}

std::uint64_t EarMatrix::total() const noexcept {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::vector<std::uint64_t> Cochleogram::channel_totals(std::size_t ear) const {
  std::vector<std::uint64_t> out(channels, 0);
  const auto& m = ears.at(ear).counts;
  for (std::uint32_t c = 0; c < channels; ++c) {
    for (std::uint32_t b = 0; b < bins; ++b) {
      out[c] += m[std::size_t{c} * bins + b];
    }
  }
  return out;
}

Cochleogram cochleogram(const SpikeStream& events, const NasConfig& config,
                        double bin_ms, std::optional<Cycle> horizon) {
  config.validate();
  const double core = static_cast<double>(events.clock().core_clock_hz());
  const auto bin_cycles =
      static_cast<Cycle>(std::llround(bin_ms * 1e-3 * core));
  if (!(bin_ms > 0.0) || bin_cycles == 0) {
    throw ArgumentError("bin_ms must cover at least one core cycle");
  }
  const NasAddressMap map(config.num_channels, config.binaural);
  for (const auto& e : events) map.decode(e.address);

  const Cycle end = std::max(horizon.value_or(0), events.end_cycle());
  Cochleogram c;
  c.channels = config.num_channels;
  c.bins = static_cast<std::uint32_t>(
      std::max<Cycle>(1, (end + bin_cycles - 1) / bin_cycles));
  c.bin_s = static_cast<double>(bin_cycles) / core;
  c.ears.resize(config.binaural ? 2 : 1);
  for (auto& ear : c.ears) {
    ear.counts.assign(std::size_t{c.channels} * c.bins, 0);
  }
  for (const auto& e : events) {
    const NasAddress a = map.decode(e.address);
    const auto bin = static_cast<std::size_t>(e.t / bin_cycles);
    ++c.ears[static_cast<std::size_t>(a.ear)]
          .counts[std::size_t{a.channel} * c.bins + bin];
  }
  return c;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
  const int decimals = std::clamp(5 - exponent, 0, 15);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

void write_bode_csv(std::ostream& os, const std::vector<BodePoint>& points) {
  os << "freq_hz,gain_db,phase_rad\n";
  for (const auto& p : points) {
    os << format_number(p.freq_hz) << ',' << format_number(p.gain_db) << ','
       << format_number(p.phase_rad) << '\n';
  }
}

void write_reconstruction_csv(std::ostream& os,
                              const ReconstructedWaveform& w) {
  os << "t_s,value\n";
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    os << format_number(static_cast<double>(n) / w.sample_rate_hz) << ','
       << format_number(w.samples[n]) << '\n';
  }
}

namespace {

template <typename Cell>
void write_matrix(std::ostream& os, const Cochleogram& c, Cell cell) {
  os << "channel";
  for (std::uint32_t b = 0; b < c.bins; ++b) os << ",b" << b;
  os << '\n';
  for (std::uint32_t ch = 0; ch < c.channels; ++ch) {
    os << ch;
    for (std::uint32_t b = 0; b < c.bins; ++b) os << ',' << cell(ch, b);
    os << '\n';
  }
}

}  // namespace

void write_cochleogram_csv(std::ostream& os, const Cochleogram& c,
                           std::size_t ear) {
  write_matrix(os, c, [&](std::uint32_t ch, std::uint32_t b) {
    return std::to_string(c.count(ear, ch, b));
  });
}

void write_sonogram_csv(std::ostream& os, const Cochleogram& c,
                        std::size_t ear) {
  write_matrix(os, c, [&](std::uint32_t ch, std::uint32_t b) {
    return format_number(c.rate(ear, ch, b));
  });
}

}  // namespace pdmspikes
