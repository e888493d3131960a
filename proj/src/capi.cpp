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

#include "pdmspikes/pdmspikes.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "pdmspikes/aer.hpp"
#include "pdmspikes/analysis.hpp"
#include "pdmspikes/errors.hpp"
#include "pdmspikes/frontend.hpp"
#include "pdmspikes/nas.hpp"
#include "pdmspikes/run_config.hpp"
#include "pdmspikes/ssp.hpp"
#include "pdmspikes/stimulus.hpp"

namespace ps = pdmspikes;

struct pdms_stream {
  ps::SpikeStream s;
};
// Plain samples + rate: holds both stimulus and reconstructed signals.
struct pdms_waveform {
  std::vector<double> samples;
  double rate = 0.0;
};
struct pdms_pdm {
  ps::PdmStream p;
};
struct pdms_nas {
  ps::NasBank bank;
};
struct pdms_cochleogram {
  ps::Cochleogram c;
};

namespace {

thread_local std::string g_error;
thread_local std::int64_t g_error_index = -1;

pdms_status fail(pdms_status st, const std::string& msg,
                 std::int64_t index = -1) {
  g_error = msg;
  g_error_index = index;
  return st;
}

template <typename F>
pdms_status guard(F&& f) {
  try {
    g_error.clear();
    g_error_index = -1;
    f();
    return PDMS_OK;
  } catch (const ps::FormatError& e) {
    return fail(PDMS_ERR_FORMAT, e.what(), e.index());
  } catch (const ps::IoError& e) {
    return fail(PDMS_ERR_IO, e.what(), static_cast<std::int64_t>(e.offset()));
  } catch (const ps::ConfigError& e) {
    return fail(PDMS_ERR_CONFIG, e.what());
  } catch (const ps::ArgumentError& e) {
    return fail(PDMS_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PDMS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PDMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PDMS_ERR_INTERNAL, "unknown error");
  }
}

template <typename T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ps::ArgumentError(std::string(what) + " is NULL");
}

ps::ClockConfig to_cpp(pdms_clock c) {
  return ps::ClockConfig(c.core_clock_hz, c.pdm_divisor);
}

pdms_clock to_c(const ps::ClockConfig& c) {
  return {c.core_clock_hz(), c.pdm_divisor()};
}

ps::SbpfConfig to_cpp(const pdms_sbpf_config& c) {
  ps::SbpfConfig out;
  out.f_low_hz = c.f_low_hz;
  out.f_high_hz = c.f_high_hz;
  out.hold.hold_cycles = c.hold_cycles;
  return out;
}

pdms_sbpf_config to_c(const ps::SbpfConfig& c) {
  return {c.f_low_hz, c.f_high_hz, c.hold.hold_cycles};
}

ps::NasConfig to_cpp(const pdms_nas_config& c) {
  ps::NasConfig out;
  out.num_channels = c.num_channels;
  out.f_start_hz = c.f_start_hz;
  out.f_end_hz = c.f_end_hz;
  out.binaural = c.binaural != 0;
  out.hold.hold_cycles = c.hold_cycles;
  out.clock = to_cpp(c.clock);
  return out;
}

pdms_nas_config to_c(const ps::NasConfig& c) {
  return {c.num_channels, c.f_start_hz, c.f_end_hz, c.binaural ? 1 : 0,
          c.hold.hold_cycles, to_c(c.clock)};
}

pdms_stream* wrap(ps::SpikeStream s) {
  return new pdms_stream{std::move(s)};
}

pdms_waveform* wrap(const ps::Waveform& w) {
  return new pdms_waveform{w.samples(), w.sample_rate_hz()};
}

ps::ReconstructedWaveform as_reconstruction(const pdms_waveform& w) {
  ps::ReconstructedWaveform r;
  r.samples = w.samples;
  r.sample_rate_hz = w.rate;
  return r;
}

std::ofstream open_out(const char* path) {
  require(path, "path");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ps::IoError(std::string("cannot open ") + path, 0);
  return os;
}

std::ifstream open_in(const char* path) {
  require(path, "path");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ps::IoError(std::string("cannot open ") + path, 0);
  return is;
}

void finish(std::ofstream& os, const char* path) {
  os.flush();
  if (!os) throw ps::IoError(std::string("write failed: ") + path, 0);
}

void copy_string(char* dst, std::size_t cap, const std::string& src) {
  if (src.size() >= cap) {
    throw ps::ConfigError("path longer than " + std::to_string(cap - 1) +
                          " bytes");
  }
  std::memcpy(dst, src.c_str(), src.size() + 1);
}

}  // namespace

extern "C" {

const char* pdms_version(void) { return "1.0.0"; }

const char* pdms_status_name(pdms_status status) {
  switch (status) {
    case PDMS_OK: return "ok";
    case PDMS_ERR_ARGUMENT: return "argument error";
    case PDMS_ERR_FORMAT: return "format error";
    case PDMS_ERR_IO: return "i/o error";
    case PDMS_ERR_CONFIG: return "config error";
    case PDMS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pdms_last_error(void) { return g_error.c_str(); }
int64_t pdms_last_error_index(void) { return g_error_index; }

size_t pdms_format_number(double x, char* buf, size_t capacity) {
  const std::string s = ps::format_number(x);
  if (buf && capacity > 0) {
    const size_t n = std::min(s.size(), capacity - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return s.size();
}

pdms_clock pdms_clock_default(void) { return to_c(ps::ClockConfig{}); }

// ---- streams ----

pdms_status pdms_stream_create(const pdms_event* events, size_t count,
                               pdms_clock clock, pdms_stream** out) {
  return guard([&] {
    require(out, "out");
    if (count > 0) require(events, "events");
    std::vector<ps::SpikeEvent> ev(count);
    for (size_t i = 0; i < count; ++i) {
      if (events[i].polarity != 1 && events[i].polarity != -1) {
        throw ps::ArgumentError("event " + std::to_string(i) +
                                ": polarity must be +1 or -1");
      }
      if ((events[i].address & 1u) != (events[i].polarity > 0 ? 1u : 0u)) {
        throw ps::ArgumentError("event " + std::to_string(i) +
                                ": polarity does not match address parity");
      }
      ev[i] = {events[i].t, events[i].address,
               static_cast<ps::Polarity>(events[i].polarity)};
    }
    *out = wrap(ps::SpikeStream(std::move(ev), to_cpp(clock)));
  });
}

void pdms_stream_free(pdms_stream* s) { delete s; }
size_t pdms_stream_size(const pdms_stream* s) { return s ? s->s.size() : 0; }
pdms_clock pdms_stream_clock(const pdms_stream* s) {
  return s ? to_c(s->s.clock()) : pdms_clock_default();
}
uint64_t pdms_stream_end_cycle(const pdms_stream* s) {
  return s ? s->s.end_cycle() : 0;
}

pdms_status pdms_stream_get(const pdms_stream* s, size_t index,
                            pdms_event* out) {
  return guard([&] {
    require(s, "stream");
    require(out, "out");
    if (index >= s->s.size()) throw ps::ArgumentError("event index out of range");
    const auto& e = s->s[index];
    *out = {e.t, e.address, static_cast<int8_t>(ps::sign_of(e.polarity))};
  });
}

pdms_status pdms_stream_copy(const pdms_stream* s, size_t first,
                             pdms_event* out, size_t capacity, size_t* copied) {
  return guard([&] {
    require(s, "stream");
    require(copied, "copied");
    if (capacity > 0) require(out, "out");
    size_t n = 0;
    for (size_t i = first; i < s->s.size() && n < capacity; ++i, ++n) {
      const auto& e = s->s[i];
      out[n] = {e.t, e.address, static_cast<int8_t>(ps::sign_of(e.polarity))};
    }
    *copied = n;
  });
}

pdms_status pdms_rate_of(const pdms_stream* s, uint64_t begin, uint64_t end,
                         double* out) {
  return guard([&] {
    require(s, "stream");
    require(out, "out");
    *out = ps::rate_of(s->s, {begin, end});
  });
}

pdms_status pdms_select_channel(const pdms_stream* s, uint32_t channel,
                                pdms_stream** out) {
  return guard([&] {
    require(s, "stream");
    require(out, "out");
    *out = wrap(ps::select_channel(s->s, channel));
  });
}

pdms_status pdms_write_aer_file(const pdms_stream* s, const char* path,
                                uint64_t* bytes_written) {
  return guard([&] {
    require(s, "stream");
    auto os = open_out(path);
    const auto n = ps::write_aer(s->s, os);
    finish(os, path);
    if (bytes_written) *bytes_written = n;
  });
}

pdms_status pdms_read_aer_file(const char* path, pdms_clock clock,
                               pdms_stream** out) {
  return guard([&] {
    require(out, "out");
    auto is = open_in(path);
    *out = wrap(ps::read_aer(is, to_cpp(clock)));
  });
}

pdms_status pdms_write_csv_file(const pdms_stream* s, const char* path) {
  return guard([&] {
    require(s, "stream");
    auto os = open_out(path);
    ps::write_events_csv(s->s, os);
    finish(os, path);
  });
}

pdms_status pdms_read_csv_file(const char* path, pdms_clock clock,
                               pdms_stream** out) {
  return guard([&] {
    require(out, "out");
    auto is = open_in(path);
    *out = wrap(ps::read_events_csv(is, to_cpp(clock)));
  });
}

// ---- stimulus ----

pdms_status pdms_waveform_create(const double* samples, size_t count,
                                 double sample_rate_hz, pdms_waveform** out) {
  return guard([&] {
    require(out, "out");
    if (count > 0) require(samples, "samples");
    *out = wrap(ps::Waveform(std::vector<double>(samples, samples + count),
                             sample_rate_hz));
  });
}

void pdms_waveform_free(pdms_waveform* w) { delete w; }
size_t pdms_waveform_size(const pdms_waveform* w) {
  return w ? w->samples.size() : 0;
}
double pdms_waveform_rate(const pdms_waveform* w) { return w ? w->rate : 0.0; }
const double* pdms_waveform_samples(const pdms_waveform* w) {
  return w ? w->samples.data() : nullptr;
}

pdms_status pdms_sine(double freq_hz, double amplitude, double duration_s,
                      double sample_rate_hz, pdms_waveform** out) {
  return guard([&] {
    require(out, "out");
    *out = wrap(ps::synth_sine(freq_hz, amplitude, duration_s, sample_rate_hz));
  });
}

pdms_status pdms_load_wav(const char* path, pdms_waveform** left,
                          pdms_waveform** right) {
  return guard([&] {
    require(left, "left");
    require(right, "right");
    auto is = open_in(path);
    const auto ch = ps::load_wav(is);
    std::unique_ptr<pdms_waveform> l(wrap(ch.at(0)));
    std::unique_ptr<pdms_waveform> r(ch.size() > 1 ? wrap(ch[1]) : nullptr);
    *left = l.release();
    *right = r.release();
  });
}

pdms_status pdms_write_wav(const char* path, const pdms_waveform* left,
                           const pdms_waveform* right) {
  return guard([&] {
    require(left, "left");
    std::vector<ps::Waveform> ch{ps::Waveform(left->samples, left->rate)};
    if (right) ch.emplace_back(right->samples, right->rate);
    auto os = open_out(path);
    ps::write_wav(os, ch);
    finish(os, path);
  });
}

pdms_status pdms_resample_zoh(const pdms_waveform* w, double target_rate_hz,
                              pdms_waveform** out) {
  return guard([&] {
    require(w, "waveform");
    require(out, "out");
    *out = wrap(ps::resample_zoh(ps::Waveform(w->samples, w->rate),
                                 target_rate_hz));
  });
}

pdms_status pdms_modulate(const pdms_waveform* w, pdms_clock clock,
                          pdms_pdm** out) {
  return guard([&] {
    require(w, "waveform");
    require(out, "out");
    *out = new pdms_pdm{ps::sigma_delta_modulate(
        ps::Waveform(w->samples, w->rate), to_cpp(clock))};
  });
}

void pdms_pdm_free(pdms_pdm* p) { delete p; }
size_t pdms_pdm_size(const pdms_pdm* p) { return p ? p->p.bits.size() : 0; }
uint64_t pdms_pdm_end_cycle(const pdms_pdm* p) {
  return p ? p->p.cycle_of(p->p.bits.size()) : 0;
}

pdms_status pdms_frontend(const pdms_pdm* p, pdms_stream** out) {
  return guard([&] {
    require(p, "pdm");
    require(out, "out");
    *out = wrap(ps::pdm_to_raw_spikes(p->p));
  });
}

// ---- spike processing ----

pdms_sbpf_config pdms_sbpf_default(void) { return to_c(ps::SbpfConfig{}); }

pdms_status pdms_cutoff_to_params(double cutoff_hz, uint64_t core_clock_hz,
                                  uint32_t* gain, uint32_t* n_bits,
                                  double* realized_hz) {
  return guard([&] {
    const auto p = ps::cutoff_to_params(cutoff_hz, core_clock_hz);
    if (gain) *gain = p.gain;
    if (n_bits) *n_bits = p.n_bits;
    if (realized_hz) *realized_hz = p.realized_cutoff_hz(core_clock_hz);
  });
}

pdms_status pdms_slpf(const pdms_stream* in, double cutoff_hz,
                      pdms_stream** out) {
  return guard([&] {
    require(in, "stream");
    require(out, "out");
    const auto p = ps::cutoff_to_params(cutoff_hz, in->s.clock().core_clock_hz());
    *out = wrap(ps::slpf_process(in->s, p));
  });
}

pdms_status pdms_hold_and_fire(const pdms_stream* a, const pdms_stream* b,
                               uint64_t hold_cycles, pdms_stream** out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = wrap(ps::hold_and_fire(a->s, b->s, {hold_cycles}));
  });
}

pdms_status pdms_sbpf(const pdms_stream* in, const pdms_sbpf_config* config,
                      pdms_stream** out) {
  return guard([&] {
    require(in, "stream");
    require(config, "config");
    require(out, "out");
    *out = wrap(ps::sbpf_process(in->s, to_cpp(*config)));
  });
}

// ---- filter bank ----

pdms_nas_config pdms_nas_default(void) { return to_c(ps::NasConfig{}); }

pdms_status pdms_nas_build(const pdms_nas_config* config, pdms_nas** out) {
  return guard([&] {
    require(config, "config");
    require(out, "out");
    *out = new pdms_nas{ps::build_nas(to_cpp(*config))};
  });
}

void pdms_nas_free(pdms_nas* nas) { delete nas; }

pdms_status pdms_nas_band_center(const pdms_nas* nas, uint32_t channel,
                                 double* out_hz) {
  return guard([&] {
    require(nas, "nas");
    require(out_hz, "out");
    if (channel >= nas->bank.num_channels()) {
      throw ps::ArgumentError("channel out of range");
    }
    *out_hz = nas->bank.config().band_center_hz(channel);
  });
}

pdms_status pdms_nas_process(const pdms_nas* nas, const pdms_stream* left,
                             const pdms_stream* right, unsigned threads,
                             pdms_stream** out) {
  return guard([&] {
    require(nas, "nas");
    require(left, "left");
    require(out, "out");
    std::optional<ps::SpikeStream> r;
    if (right) r = right->s;
    *out = wrap(ps::nas_process(left->s, r, nas->bank, {threads}));
  });
}

// ---- analysis ----

pdms_status pdms_zero_crossings(const pdms_stream* s, uint64_t* out) {
  return guard([&] {
    require(s, "stream");
    require(out, "out");
    *out = ps::count_zero_crossings(s->s);
  });
}

pdms_status pdms_reconstruct(const pdms_stream* s, double analysis_rate_hz,
                             double full_scale_rate, uint64_t horizon,
                             pdms_waveform** out) {
  return guard([&] {
    require(s, "stream");
    require(out, "out");
    std::optional<ps::Cycle> h;
    if (horizon > 0) h = horizon;
    auto r = ps::reconstruct_from_isi(s->s, analysis_rate_hz, full_scale_rate, h);
    *out = new pdms_waveform{std::move(r.samples), r.sample_rate_hz};
  });
}

pdms_status pdms_thd(const pdms_waveform* w, double f0_hz,
                     unsigned n_harmonics, pdms_spectral* out) {
  return guard([&] {
    require(w, "waveform");
    require(out, "out");
    const auto m = ps::measure_thd(as_reconstruction(*w), f0_hz, n_harmonics);
    *out = {m.db, m.f0_not_peak ? 1 : 0};
  });
}

pdms_status pdms_snr(const pdms_waveform* w, double f0_hz,
                     unsigned n_harmonics, double band_hz,
                     pdms_spectral* out) {
  return guard([&] {
    require(w, "waveform");
    require(out, "out");
    const auto m =
        ps::measure_snr(as_reconstruction(*w), f0_hz, n_harmonics, band_hz);
    *out = {m.db, m.f0_not_peak ? 1 : 0};
  });
}

pdms_status pdms_write_reconstruction_csv(const pdms_waveform* w,
                                          const char* path) {
  return guard([&] {
    require(w, "waveform");
    auto os = open_out(path);
    ps::write_reconstruction_csv(os, as_reconstruction(*w));
    finish(os, path);
  });
}

pdms_bode_settings pdms_bode_default(void) {
  const ps::BodeSettings s;
  return {s.amplitude,        s.settle_periods,  s.measure_periods,
          s.min_settle_s,     s.min_measure_s,   s.analysis_rate_hz,
          s.full_scale_rate,  to_c(s.clock),     s.threads};
}

pdms_status pdms_log_spaced(double f_min, double f_max,
                            unsigned points_per_decade, double* out,
                            size_t capacity, size_t* count) {
  return guard([&] {
    require(count, "count");
    const auto f = ps::log_spaced_frequencies(f_min, f_max, points_per_decade);
    *count = f.size();
    if (out == nullptr) return;
    if (capacity < f.size()) throw ps::ArgumentError("output buffer too small");
    std::copy(f.begin(), f.end(), out);
  });
}

pdms_status pdms_bode_sweep_sbpf(const pdms_sbpf_config* config,
                                 const double* freqs, size_t count,
                                 const pdms_bode_settings* settings,
                                 pdms_bode_point* out) {
  return guard([&] {
    require(freqs, "freqs");
    require(settings, "settings");
    require(out, "out");
    ps::BodeSettings s;
    s.amplitude = settings->amplitude;
    s.settle_periods = settings->settle_periods;
    s.measure_periods = settings->measure_periods;
    s.min_settle_s = settings->min_settle_s;
    s.min_measure_s = settings->min_measure_s;
    s.analysis_rate_hz = settings->analysis_rate_hz;
    s.full_scale_rate = settings->full_scale_rate;
    s.clock = to_cpp(settings->clock);
    s.threads = settings->threads;

    ps::SpikeSystem system = [](const ps::SpikeStream& in) { return in; };
    if (config) {
      const ps::SbpfConfig c = to_cpp(*config);
      c.validate();
      system = [c](const ps::SpikeStream& in) { return ps::sbpf_process(in, c); };
    }
    const auto pts =
        ps::bode_sweep(system, std::vector<double>(freqs, freqs + count), s);
    for (size_t i = 0; i < pts.size(); ++i) {
      out[i] = {pts[i].freq_hz, pts[i].gain_db, pts[i].phase_rad};
    }
  });
}

pdms_status pdms_write_bode_csv(const pdms_bode_point* points, size_t count,
                                const char* path) {
  return guard([&] {
    if (count > 0) require(points, "points");
    std::vector<ps::BodePoint> pts(count);
    for (size_t i = 0; i < count; ++i) {
      pts[i] = {points[i].freq_hz, points[i].gain_db, points[i].phase_rad};
    }
    auto os = open_out(path);
    ps::write_bode_csv(os, pts);
    finish(os, path);
  });
}

pdms_status pdms_cochleogram_create(const pdms_stream* events,
                                    const pdms_nas_config* config,
                                    double bin_ms, uint64_t horizon,
                                    pdms_cochleogram** out) {
  return guard([&] {
    require(events, "events");
    require(config, "config");
    require(out, "out");
    std::optional<ps::Cycle> h;
    if (horizon > 0) h = horizon;
    *out = new pdms_cochleogram{
        ps::cochleogram(events->s, to_cpp(*config), bin_ms, h)};
  });
}

void pdms_cochleogram_free(pdms_cochleogram* c) { delete c; }

void pdms_cochleogram_shape(const pdms_cochleogram* c, uint32_t* ears,
                            uint32_t* channels, uint32_t* bins, double* bin_s) {
  if (!c) return;
  if (ears) *ears = static_cast<uint32_t>(c->c.ears.size());
  if (channels) *channels = c->c.channels;
  if (bins) *bins = c->c.bins;
  if (bin_s) *bin_s = c->c.bin_s;
}

pdms_status pdms_cochleogram_count(const pdms_cochleogram* c, uint32_t ear,
                                   uint32_t channel, uint32_t bin,
                                   uint64_t* out) {
  return guard([&] {
    require(c, "cochleogram");
    require(out, "out");
    if (ear >= c->c.ears.size() || channel >= c->c.channels ||
        bin >= c->c.bins) {
      throw ps::ArgumentError("cochleogram index out of range");
    }
    *out = c->c.count(ear, channel, bin);
  });
}

pdms_status pdms_write_cochleogram_csv(const pdms_cochleogram* c, uint32_t ear,
                                       const char* path) {
  return guard([&] {
    require(c, "cochleogram");
    if (ear >= c->c.ears.size()) throw ps::ArgumentError("no such ear");
    auto os = open_out(path);
    ps::write_cochleogram_csv(os, c->c, ear);
    finish(os, path);
  });
}

pdms_status pdms_write_sonogram_csv(const pdms_cochleogram* c, uint32_t ear,
                                    const char* path) {
  return guard([&] {
    require(c, "cochleogram");
    if (ear >= c->c.ears.size()) throw ps::ArgumentError("no such ear");
    auto os = open_out(path);
    ps::write_sonogram_csv(os, c->c, ear);
    finish(os, path);
  });
}

// ---- run configuration ----

namespace {

void fill(const ps::RunConfig& rc, pdms_run_config* out) {
  out->clock = to_c(rc.clock);
  out->psi = to_c(rc.psi);
  out->nas = to_c(rc.nas);
  out->bin_ms = rc.analysis.bin_ms;
  out->analysis_rate_hz = rc.analysis.analysis_rate_hz;
  out->full_scale_rate = rc.analysis.full_scale_rate;
  copy_string(out->input, sizeof out->input, rc.io.input);
  copy_string(out->output_dir, sizeof out->output_dir, rc.io.output_dir);
  out->want_aer = rc.io.wants("aer") ? 1 : 0;
  out->want_csv = rc.io.wants("csv") ? 1 : 0;
}

}  // namespace

void pdms_run_config_default(pdms_run_config* out) {
  if (!out) return;
  std::memset(out, 0, sizeof *out);
  ps::RunConfig rc;
  fill(rc, out);
}

pdms_status pdms_run_config_load(const char* path, pdms_run_config* out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    const auto rc = ps::load_run_config(path);
    pdms_run_config tmp;
    std::memset(&tmp, 0, sizeof tmp);
    fill(rc, &tmp);
    *out = tmp;
  });
}

}  // extern "C"
