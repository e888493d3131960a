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

// One line per acceptance criterion; exit status is nonzero if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pdmspikes/aer.hpp"
#include "pdmspikes/analysis.hpp"
#include "pdmspikes/frontend.hpp"
#include "pdmspikes/nas.hpp"
#include "pdmspikes/ssp.hpp"
#include "pdmspikes/stimulus.hpp"

namespace ps = pdmspikes;

namespace {

constexpr double kPdmRate = 3'125'000.0;
constexpr double kCore = 50'000'000.0;
constexpr double kTwoPi = 2 * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<std::string> lines;
  int failures = 0;

  void add(int id, const std::string& name, const Outcome& o, double seconds) {
    char head[128];
    std::snprintf(head, sizeof head, "[%s] %2d %-28s", o.pass ? "PASS" : "FAIL", id,
                  name.c_str());
    char tail[64];
    std::snprintf(tail, sizeof tail, " (%.2f s)", seconds);
    const std::string line = head + o.detail + tail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
    if (!o.pass) ++failures;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ps::SpikeStream frontend_tone(double f, double amp, double seconds) {
  return ps::pdm_to_raw_spikes(
      ps::sigma_delta_modulate(ps::synth_sine(f, amp, seconds, kPdmRate), {}));
}

// Shared by criteria 1-3.
struct PsiRun {
  ps::SpikeStream frontend;
  ps::SpikeStream sbpf;
  double sbpf_seconds = 0.0;
};

PsiRun run_psi() {
  PsiRun r;
  r.frontend = frontend_tone(500, 0.5, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  r.sbpf = ps::sbpf_process(r.frontend, {});
  r.sbpf_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Outcome c1_zero_crossings(const PsiRun& r) {
  const auto zc = ps::count_zero_crossings(r.sbpf);
  const bool ok = std::abs(static_cast<double>(zc) - 1000.0) <= 10.0 && r.sbpf_seconds <= 60.0;
  return {ok, fmt("sbpf zero crossings %llu (1000 +/- 1%%), sbpf runtime %.2f s (<= 60 s)",
                  static_cast<unsigned long long>(zc), r.sbpf_seconds)};
}

Outcome c2_frontend_noise(const PsiRun& r) {
  const auto fe = ps::count_zero_crossings(r.frontend);
  const auto sb = ps::count_zero_crossings(r.sbpf);
  const bool ok = fe >= 50'000 && static_cast<double>(fe) >= 20.0 * static_cast<double>(sb);
  return {ok, fmt("front-end zero crossings %llu (>= 50000 and >= 20 x %llu)",
                  static_cast<unsigned long long>(fe), static_cast<unsigned long long>(sb))};
}

ps::ReconstructedWaveform synthetic(double seconds, const std::function<double(double)>& f) {
  ps::ReconstructedWaveform w;
  w.sample_rate_hz = 100'000;
  w.samples.resize(static_cast<std::size_t>(seconds * w.sample_rate_hz));
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    w.samples[n] = f(static_cast<double>(n) / w.sample_rate_hz);
  }
  return w;
}

Outcome c3_thd_snr(const PsiRun& r) {
  const auto w = ps::reconstruct_from_isi(r.sbpf, 100'000);
  const double thd = ps::measure_thd(w, 500).db;
  const double snr = ps::measure_snr(w, 500).db;

  // Calibration: 1% second harmonic is -40 dB THD; in-band noise at -40 dB
  // relative to the tone is 40 dB SNR.
  const auto harm = synthetic(1.0, [](double t) {
    return 0.5 * std::sin(kTwoPi * 500 * t) + 0.005 * std::sin(kTwoPi * 1000 * t + 0.3);
  });
  const double cal_thd = ps::measure_thd(harm, 500).db;
  std::mt19937_64 rng(2024);
  const double sigma = std::sqrt(0.125 * 1e-4 * 50'000.0 / 20'000.0);
  std::normal_distribution<double> noise(0.0, sigma);
  const auto noisy = synthetic(1.0, [&](double t) {
    return 0.5 * std::sin(kTwoPi * 500 * t) + noise(rng);
  });
  const double cal_snr = ps::measure_snr(noisy, 500).db;

  const bool ok = thd <= -35.0 && snr >= 45.0 && std::abs(cal_thd + 40.0) <= 1.0 &&
                  std::abs(cal_snr - 40.0) <= 1.0;
  return {ok, fmt("chain THD %.2f dB (<= -35), SNR %.2f dB (>= 45); calibration THD %.2f "
                  "(-40 +/- 1), SNR %.2f (40 +/- 1)",
                  thd, snr, cal_thd, cal_snr)};
}

Outcome c4_bode(std::vector<ps::BodePoint>* out, unsigned threads) {
  const auto freqs = ps::log_spaced_frequencies(20, 20'000, 10);
  ps::BodeSettings st;
  st.threads = threads;
  const ps::SbpfConfig cfg;
  const auto pts = ps::bode_sweep([&](const ps::SpikeStream& s) { return ps::sbpf_process(s, cfg); },
                                  freqs, st);
  *out = pts;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].gain_db > pts[peak].gain_db) peak = i;
  }
  const double g_peak = pts[peak].gain_db;
  const double f_peak = pts[peak].freq_hz;
  const double drop_lo = g_peak - pts.front().gain_db;
  const double drop_hi = g_peak - pts.back().gain_db;
  // Passband: points strictly between the configured corners.
  double max_phase = -INFINITY;
  for (const auto& p : pts) {
    if (p.freq_hz > cfg.f_low_hz && p.freq_hz < cfg.f_high_hz) {
      max_phase = std::max(max_phase, p.phase_rad);
    }
  }
  const bool ok = pts.size() == 31 && drop_lo >= 10.0 && drop_hi >= 10.0 &&
                  f_peak > 70.0 && f_peak < 12'000.0 && max_phase < 0.0;
  return {ok, fmt("%zu points, peak %.2f dB at %.1f Hz (inside 70..12000), 20 Hz %.2f dB "
                  "below (>= 10), 20 kHz %.2f dB below (>= 10), max passband phase %.3f rad (< 0)",
                  pts.size(), g_peak, f_peak, drop_lo, drop_hi, max_phase)};
}

// Floating-point first-order response to the same spike train, averaged over
// 1 ms windows.
std::vector<double> iir_windows(const ps::SpikeStream& in, double fc, ps::Cycle end,
                                ps::Cycle window) {
  const double a = kTwoPi * fc / kCore;  // per-cycle coefficient
  std::vector<double> out(static_cast<std::size_t>(end / window), 0.0);
  double y = 0.0;
  std::size_t i = 0;
  for (ps::Cycle c = 0; c < end; ++c) {
    double x = 0.0;
    while (i < in.size() && in[i].t == c) x += ps::sign_of(in[i++].polarity) * kCore;
    y += a * (x - y);
    const auto k = static_cast<std::size_t>(c / window);
    if (k < out.size()) out[k] += y / static_cast<double>(window);
  }
  return out;
}

Outcome c5_slpf() {
  constexpr ps::Cycle kWindow = 50'000;  // 1 ms
  std::string detail;
  bool ok = true;
  for (double fc : {100.0, 1'000.0, 12'000.0}) {
    const auto params = ps::cutoff_to_params(fc, static_cast<std::uint64_t>(kCore));
    const double realized = params.realized_cutoff_hz(static_cast<std::uint64_t>(kCore));
    const double tau = 1.0 / (kTwoPi * realized);
    // 1 M sp/s step, long enough for 10 time constants plus a DC tail.
    const double seconds = std::max(0.03, 10 * tau + 0.01);
    const auto end = static_cast<ps::Cycle>(seconds * kCore) / kWindow * kWindow;
    std::vector<ps::SpikeEvent> ev;
    for (ps::Cycle t = 0; t < end; t += 50) ev.push_back({t, 1, ps::Polarity::kPositive});
    const ps::SpikeStream in(std::move(ev), {});
    const auto out = ps::slpf_process(in, params, 0, end);
    const auto oracle = iir_windows(in, realized, end, kWindow);
    double err = 0.0;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      const double got = ps::rate_of(out, {k * kWindow, (k + 1) * kWindow});
      err += (got - oracle[k]) * (got - oracle[k]);
    }
    const double rms = std::sqrt(err / static_cast<double>(oracle.size())) / 1e6;
    const double dc = ps::rate_of(out, {end - 500'000, end}) / 1e6;
    ok = ok && rms <= 0.05 && std::abs(dc - 1.0) <= 0.02;
    detail += fmt("%g Hz: rms %.2f%% dc %.4f; ", fc, 100 * rms, dc);
  }
  detail += "(rms <= 5%, dc 1 +/- 2%)";
  return {ok, detail};
}

ps::SpikeStream uniform(std::size_t n, ps::Cycle isi) {
  std::vector<ps::SpikeEvent> ev;
  for (std::size_t i = 0; i < n; ++i) ev.push_back({i * isi, 1, ps::Polarity::kPositive});
  return ps::SpikeStream(std::move(ev), {});
}

Outcome c6_hold_and_fire() {
  const ps::HoldAndFireParams hold{16};
  const auto a = uniform(10'000, 5'000);
  const auto b = uniform(4'000, 12'500);
  const double rate = ps::rate_of(ps::hold_and_fire(a, b, hold), {0, 50'000'000});
  const auto same = ps::hold_and_fire(a, a, hold);
  const auto id = ps::hold_and_fire(a, ps::SpikeStream(), hold);
  bool identity = id.size() == a.size();
  for (std::size_t i = 0; identity && i < a.size(); ++i) {
    identity = id[i].t == a[i].t + 16 && id[i].polarity == a[i].polarity;
  }
  const double residual = static_cast<double>(same.size()) / static_cast<double>(a.size());
  const bool ok = std::abs(rate - 6'000) <= 120 && residual <= 0.001 && identity;
  return {ok, fmt("10k - 4k = %.1f sp/s (6000 +/- 2%%), identical residual %.4f%% (<= 0.1%%), "
                  "empty subtrahend identity %s",
                  rate, 100 * residual, identity ? "yes" : "no")};
}

Outcome c7_generator() {
  std::mt19937_64 rng(7);
  int trials = 0;
  int bad_isi = 0;
  int bad_count = 0;
  for (; trials < 500; ++trials) {
    const auto gain = static_cast<std::uint32_t>(1 + rng() % 255);
    const unsigned bits = 10 + static_cast<unsigned>(rng() % 19);
    const std::uint64_t max_v = ((std::uint64_t{1} << bits) - 1) / gain;
    if (max_v == 0) continue;
    const auto v = static_cast<std::int64_t>(1 + rng() % max_v) * (rng() % 2 ? 1 : -1);
    const long ticks = 200'000;
    ps::SpikeGenerator g(gain, bits);
    std::vector<long> fires;
    for (long i = 0; i < ticks; ++i) {
      if (g.tick(v)) fires.push_back(i);
    }
    std::set<long> isis;
    for (std::size_t i = 1; i < fires.size(); ++i) isis.insert(fires[i] - fires[i - 1]);
    if (isis.size() > 2 || (isis.size() == 2 && *isis.rbegin() - *isis.begin() != 1)) ++bad_isi;
    const double exact = static_cast<double>(ticks) * gain * static_cast<double>(std::abs(v)) /
                         std::ldexp(1.0, static_cast<int>(bits));
    const auto n = static_cast<double>(fires.size());
    if (n < std::floor(exact) || n > std::ceil(exact)) ++bad_count;
  }
  return {bad_isi == 0 && bad_count == 0,
          fmt("%d random drives: %d with > 2 ISI values, %d counts outside floor/ceil", trials,
              bad_isi, bad_count)};
}

Outcome c8_cutoff() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double f = 20.0 * std::pow(1000.0, i / 99.0);
    const auto p = ps::cutoff_to_params(f, 50'000'000);
    worst = std::max(worst, std::abs(p.realized_cutoff_hz(50'000'000) - f) / f);
  }
  return {worst <= 0.02, fmt("worst relative error %.4f%% over 100 targets (<= 2%%)", 100 * worst)};
}

Outcome c9_nas_selectivity() {
  ps::NasConfig cfg;  // 64 channels, mono
  const auto bank = ps::build_nas(cfg);
  const auto out = ps::nas_process(frontend_tone(500, 1.0, 0.5), std::nullopt, bank);
  const auto c = ps::cochleogram(out, cfg);
  const auto totals = c.channel_totals(0);
  const auto cut = cfg.stage_cutoffs();
  std::uint64_t near = 0;
  for (std::uint32_t ch = 0; ch < cfg.num_channels; ++ch) {
    if (std::abs(std::log2(cfg.band_center_hz(ch) / 500.0)) <= 0.5) near += totals[ch];
  }
  const auto argmax = static_cast<std::uint32_t>(
      std::max_element(totals.begin(), totals.end()) - totals.begin());
  const bool contains = cut[argmax + 1] <= 500.0 && 500.0 <= cut[argmax];
  const double frac = out.empty() ? 0.0 : static_cast<double>(near) / static_cast<double>(out.size());
  return {frac >= 0.5 && contains,
          fmt("%zu events, %.1f%% within 1/2 octave of 500 Hz (>= 50%%), argmax channel %u "
              "band [%.1f, %.1f] Hz contains 500: %s",
              out.size(), 100 * frac, argmax, cut[argmax + 1], cut[argmax],
              contains ? "yes" : "no")};
}

Outcome c10_aer() {
  std::mt19937_64 rng(10);
  int bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::uniform_int_distribution<ps::Cycle> gap(1, 1 + rng() % 5'000);
    std::vector<ps::SpikeEvent> ev;
    ps::Cycle t = rng() % 1'000;
    const std::size_t n = rng() % 400;
    for (std::size_t i = 0; i < n; ++i) {
      const auto addr = static_cast<std::uint32_t>(rng() % 256);
      ev.push_back({t, addr, ps::polarity_of_address(addr)});
      t += gap(rng);
    }
    const ps::SpikeStream s(std::move(ev), {});
    std::stringstream io;
    ps::write_aer(s, io);
    const auto r = ps::read_aer(io, {});
    bool same = r.size() == s.size();
    for (std::size_t i = 0; same && i < s.size(); ++i) {
      const double dt_us =
          std::abs(static_cast<double>(r[i].t) - static_cast<double>(s[i].t)) / 50.0;
      same = r[i].address == s[i].address && r[i].polarity == s[i].polarity && dt_us <= 1.0;
    }
    if (!same) ++bad;
  }
  return {bad == 0, fmt("1000 random streams, %d mismatches", bad)};
}

Outcome c11_differential() {
  std::mt19937_64 rng(11);
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ps::SpikeEvent> ev;
    ps::Cycle t = rng() % 50;
    const ps::Cycle max_gap = 1 + rng() % 64;
    for (int i = 0; i < 2'000; ++i) {
      const auto p = rng() % 3 ? ps::Polarity::kPositive : ps::Polarity::kNegative;
      ev.push_back({t, ps::address_of(1, p), p});
      t += 1 + rng() % max_gap;
    }
    const ps::SpikeStream in(std::move(ev), {});
    const double fc = 20.0 * std::pow(1000.0, static_cast<double>(rng() % 1000) / 999.0);
    auto params = ps::cutoff_to_params(fc, 50'000'000);
    if (trial % 4 == 0) params.integrator_limit = 1 + static_cast<std::int64_t>(rng() % 64);
    const ps::Cycle horizon = in.end_cycle() + rng() % 20'000;
    const bool slpf = ps::slpf_process(in, params, 0, horizon) ==
                      ps::slpf_process_reference(in, params, 0, horizon);
    const auto other = ps::slpf_process(in, ps::cutoff_to_params(fc * 3 + 50, 50'000'000));
    const ps::HoldAndFireParams hold{1 + rng() % 256};
    const bool hf = ps::hold_and_fire(in, other, hold) == ps::hold_and_fire_reference(in, other, hold);
    ps::SbpfConfig cfg;
    cfg.f_low_hz = fc;
    cfg.f_high_hz = std::min(fc * (2 + static_cast<double>(rng() % 50)), 400'000.0);
    cfg.hold = hold;
    const bool sbpf = ps::sbpf_process(in, cfg) == ps::sbpf_process_reference(in, cfg);
    if (!(slpf && hf && sbpf)) ++bad;
  }
  return {bad == 0, fmt("100 random inputs through SLPF, hold&fire, SBPF: %d differ", bad)};
}

Outcome c12_performance(double* seconds_out) {
  ps::NasConfig cfg;
  const auto bank = ps::build_nas(cfg);
  const auto in = frontend_tone(1'000, 0.5, 1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = ps::nas_process(in, std::nullopt, bank);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  *seconds_out = s;
  return {s <= 300.0, fmt("64-channel NAS, 1 s audio (%zu input spikes -> %zu events) in %.2f s "
                          "(<= 300 s)",
                          in.size(), out.size(), s)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string report_path;
  unsigned threads = 1;
  app.add_option("--report", report_path, "benchmark report output");
  app.add_option("--threads", threads, "workers for the frequency sweep")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  Report report;
  auto timed = [&](int id, const std::string& name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = fn();
    report.add(id, name, o,
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };

  const auto t0 = std::chrono::steady_clock::now();
  const PsiRun psi = run_psi();
  const double psi_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<ps::BodePoint> bode;
  double nas_s = 0.0;
  timed(1, "zero-crossing exactness", [&] { return c1_zero_crossings(psi); });
  timed(2, "front-end noisiness", [&] { return c2_frontend_noise(psi); });
  timed(3, "THD/SNR thresholds", [&] { return c3_thd_snr(psi); });
  timed(4, "Bode shape", [&] { return c4_bode(&bode, threads); });
  timed(5, "SLPF oracle equivalence", c5_slpf);
  timed(6, "hold&fire rate arithmetic", c6_hold_and_fire);
  timed(7, "generator ISI uniformity", c7_generator);
  timed(8, "cutoff_to_params accuracy", c8_cutoff);
  timed(9, "NAS selectivity", c9_nas_selectivity);
  timed(10, "AER round trip", c10_aer);
  timed(11, "fast vs per-cycle reference", c11_differential);
  timed(12, "NAS performance", [&] { return c12_performance(&nas_s); });

  std::printf("%d of 12 criteria failed\n", report.failures);

  if (!report_path.empty()) {
    std::ofstream os(report_path);
    os << "# pdmspikes benchmark report\n";
    os << fmt("psi_chain_1s_seconds=%.3f\n", psi_s);
    os << fmt("sbpf_1s_seconds=%.3f\n", psi.sbpf_seconds);
    os << fmt("nas64_mono_1s_seconds=%.3f\n", nas_s);
    os << fmt("failed_criteria=%d\n", report.failures);
    os << "\n# criteria\n";
    for (const auto& l : report.lines) os << l << '\n';
    os << "\n# sbpf bode sweep\nfreq_hz,gain_db,phase_rad\n";
    for (const auto& p : bode) {
      os << ps::format_number(p.freq_hz) << ',' << ps::format_number(p.gain_db) << ','
         << ps::format_number(p.phase_rad) << '\n';
    }
  }
  return report.failures == 0 ? 0 : 1;
}
