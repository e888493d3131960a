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

// pdmspikes command-line tool. Talks to the library only through the C API.
//
//   pdmspikes psi   --sine 500,0.5,1s [--config f] [--out dir]
//   pdmspikes sweep --f-min 20 --f-max 20000 --ppd 10
//   pdmspikes nas   --wav speech.wav
//   pdmspikes aer-info events.aer
//
// PDMS_THREADS overrides the worker thread count.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pdmspikes/pdmspikes.h"

namespace fs = std::filesystem;

namespace {

// Failure carrying the process exit code.
struct CliError : std::runtime_error {
  int code;
  CliError(const std::string& what, int c) : std::runtime_error(what), code(c) {}
};

void check(pdms_status st, const std::string& context) {
  if (st != PDMS_OK) {
    throw CliError(context + ": " + pdms_status_name(st) + ": " +
                       pdms_last_error(),
                   static_cast<int>(st) + 1);
  }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Stream = std::unique_ptr<pdms_stream, Deleter<pdms_stream, pdms_stream_free>>;
using Wave = std::unique_ptr<pdms_waveform, Deleter<pdms_waveform, pdms_waveform_free>>;
using Pdm = std::unique_ptr<pdms_pdm, Deleter<pdms_pdm, pdms_pdm_free>>;
using Nas = std::unique_ptr<pdms_nas, Deleter<pdms_nas, pdms_nas_free>>;
using Cochlea = std::unique_ptr<pdms_cochleogram,
                                Deleter<pdms_cochleogram, pdms_cochleogram_free>>;

std::string num(double x) {
  char buf[64];
  pdms_format_number(x, buf, sizeof buf);
  return buf;
}

unsigned thread_count(unsigned flag) {
  if (const char* env = std::getenv("PDMS_THREADS")) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0' || v < 1 || v > 1024) {
      throw CliError(std::string("PDMS_THREADS must be an integer in [1, 1024], got '") +
                         env + "'",
                     2);
    }
    return static_cast<unsigned>(v);
  }
  if (flag > 0) return flag;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Output files are staged next to their destination and renamed into place.
class AtomicFile {
 public:
  explicit AtomicFile(fs::path dest)
      : dest_(std::move(dest)), tmp_(dest_.string() + ".tmp") {}
  ~AtomicFile() {
    std::error_code ec;
    if (!committed_) fs::remove(tmp_, ec);
  }
  const std::string tmp() const { return tmp_.string(); }
  void commit() {
    std::error_code ec;
    fs::rename(tmp_, dest_, ec);
    if (ec) throw CliError("cannot rename into " + dest_.string() + ": " + ec.message(), 4);
    committed_ = true;
  }

 private:
  fs::path dest_;
  fs::path tmp_;
  bool committed_ = false;
};

void write_text(const fs::path& dest, const std::string& text) {
  AtomicFile f(dest);
  {
    std::ofstream os(f.tmp(), std::ios::binary | std::ios::trunc);
    os << text;
    os.flush();
    if (!os) throw CliError("cannot write " + dest.string(), 4);
  }
  f.commit();
}

template <typename Writer>
void write_atomic(const fs::path& dest, Writer&& w) {
  AtomicFile f(dest);
  w(f.tmp().c_str());
  f.commit();
}

struct SineSpec {
  double freq = 0.0;
  double amplitude = 0.0;
  double duration = 0.0;
};

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CliError("invalid " + what + ": '" + s + "'", 2);
  }
}

// "freq,amplitude,duration" with an optional s / ms suffix on duration.
SineSpec parse_sine(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 3) {
    throw CliError("--sine expects freq,amplitude,duration (e.g. 500,0.5,1s)", 2);
  }
  SineSpec s;
  s.freq = parse_double(parts[0], "sine frequency");
  s.amplitude = parse_double(parts[1], "sine amplitude");
  std::string d = parts[2];
  double scale = 1.0;
  if (d.size() > 2 && d.substr(d.size() - 2) == "ms") {
    d.resize(d.size() - 2);
    scale = 1e-3;
  } else if (!d.empty() && d.back() == 's') {
    d.pop_back();
  }
  s.duration = parse_double(d, "sine duration") * scale;
  if (!(s.duration > 0.0)) throw CliError("sine duration must be positive", 2);
  if (!(s.amplitude >= 0.0 && s.amplitude <= 1.0)) {
    throw CliError("sine amplitude must lie in [0, 1]", 2);
  }
  return s;
}

struct Common {
  std::string config_path;
  std::string out_dir;
  unsigned threads = 0;
};

pdms_run_config load_config(const Common& c) {
  pdms_run_config cfg;
  if (c.config_path.empty()) {
    pdms_run_config_default(&cfg);
  } else {
    check(pdms_run_config_load(c.config_path.c_str(), &cfg), "config");
  }
  return cfg;
}

fs::path output_dir(const Common& c, const pdms_run_config& cfg) {
  fs::path dir = c.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError("cannot create " + dir.string() + ": " + ec.message(), 4);
  return dir;
}

// Stimulus at the PDM clock rate: one waveform per ear.
struct Stimulus {
  std::vector<Wave> ears;
  std::optional<double> f0;
};

Wave at_pdm_rate(Wave w, const pdms_run_config& cfg) {
  const double pdm_rate =
      static_cast<double>(cfg.clock.core_clock_hz / cfg.clock.pdm_divisor);
  if (pdms_waveform_rate(w.get()) == pdm_rate) return w;
  pdms_waveform* r = nullptr;
  check(pdms_resample_zoh(w.get(), pdm_rate, &r), "resample");
  return Wave(r);
}

Stimulus load_stimulus(const std::string& sine, const std::string& wav,
                       const pdms_run_config& cfg) {
  Stimulus s;
  const std::string path = wav.empty() ? std::string(cfg.input) : wav;
  if (!sine.empty() && !wav.empty()) {
    throw CliError("give either --sine or --wav, not both", 2);
  }
  if (!sine.empty()) {
    const SineSpec spec = parse_sine(sine);
    const double pdm_rate =
        static_cast<double>(cfg.clock.core_clock_hz / cfg.clock.pdm_divisor);
    pdms_waveform* w = nullptr;
    check(pdms_sine(spec.freq, spec.amplitude, spec.duration, pdm_rate, &w), "sine");
    s.ears.emplace_back(w);
    s.f0 = spec.freq;
    return s;
  }
  if (path.empty()) throw CliError("no input: use --sine, --wav or io.input", 2);
  pdms_waveform* l = nullptr;
  pdms_waveform* r = nullptr;
  check(pdms_load_wav(path.c_str(), &l, &r), path);
  s.ears.push_back(at_pdm_rate(Wave(l), cfg));
  if (r) s.ears.push_back(at_pdm_rate(Wave(r), cfg));
  return s;
}

struct Chain {
  Pdm pdm;
  Stream frontend;
};

Chain front_end(const pdms_waveform* w, const pdms_run_config& cfg) {
  Chain c;
  pdms_pdm* p = nullptr;
  check(pdms_modulate(w, cfg.clock, &p), "modulate");
  c.pdm.reset(p);
  pdms_stream* fe = nullptr;
  check(pdms_frontend(p, &fe), "front-end");
  c.frontend.reset(fe);
  return c;
}

void write_events(const fs::path& dir, const std::string& stem,
                  const pdms_stream* s, const pdms_run_config& cfg) {
  if (cfg.want_aer) {
    write_atomic(dir / (stem + ".aer"), [&](const char* tmp) {
      check(pdms_write_aer_file(s, tmp, nullptr), "write " + stem + ".aer");
    });
  }
  if (cfg.want_csv) {
    write_atomic(dir / (stem + "_events.csv"), [&](const char* tmp) {
      check(pdms_write_csv_file(s, tmp), "write " + stem + "_events.csv");
    });
  }
}

int cmd_psi(const Common& common, const std::string& sine, const std::string& wav,
            double f0_flag) {
  const pdms_run_config cfg = load_config(common);
  const fs::path dir = output_dir(common, cfg);
  Stimulus stim = load_stimulus(sine, wav, cfg);
  if (f0_flag > 0.0) stim.f0 = f0_flag;

  Chain chain = front_end(stim.ears.front().get(), cfg);
  pdms_stream* raw = nullptr;
  check(pdms_sbpf(chain.frontend.get(), &cfg.psi, &raw), "sbpf");
  Stream sbpf(raw);
  write_events(dir, "psi", sbpf.get(), cfg);

  std::uint64_t zc_fe = 0;
  std::uint64_t zc = 0;
  check(pdms_zero_crossings(chain.frontend.get(), &zc_fe), "zero crossings");
  check(pdms_zero_crossings(sbpf.get(), &zc), "zero crossings");

  std::vector<std::pair<std::string, std::string>> metrics = {
      {"frontend_events", std::to_string(pdms_stream_size(chain.frontend.get()))},
      {"frontend_zero_crossings", std::to_string(zc_fe)},
      {"sbpf_events", std::to_string(pdms_stream_size(sbpf.get()))},
      {"zero_crossings", std::to_string(zc)},
  };

  if (pdms_stream_size(sbpf.get()) > 0) {
    pdms_waveform* rec = nullptr;
    check(pdms_reconstruct(sbpf.get(), cfg.analysis_rate_hz, cfg.full_scale_rate,
                           pdms_pdm_end_cycle(chain.pdm.get()), &rec),
          "reconstruct");
    Wave recon(rec);
    write_atomic(dir / "reconstruction.csv", [&](const char* tmp) {
      check(pdms_write_reconstruction_csv(recon.get(), tmp), "write reconstruction");
    });
    if (stim.f0) {
      pdms_spectral thd{};
      pdms_spectral snr{};
      const pdms_status st_thd = pdms_thd(recon.get(), *stim.f0, 9, &thd);
      const pdms_status st_snr = pdms_snr(recon.get(), *stim.f0, 9, 20'000.0, &snr);
      if (st_thd == PDMS_OK && st_snr == PDMS_OK) {
        metrics.emplace_back("thd_db", num(thd.db));
        metrics.emplace_back("snr_db", num(snr.db));
        metrics.emplace_back("f0_not_peak", std::to_string(thd.f0_not_peak));
      } else {
        std::cerr << "warning: THD/SNR skipped: " << pdms_last_error() << "\n";
      }
    }
  }

  std::string text;
  for (const auto& [k, v] : metrics) text += k + "=" + v + "\n";
  write_text(dir / "metrics.txt", text);
  std::cout << text;
  return 0;
}

int cmd_sweep(const Common& common, double f_min, double f_max, unsigned ppd,
              double amplitude) {
  const pdms_run_config cfg = load_config(common);
  const fs::path dir = output_dir(common, cfg);
  std::size_t n = 0;
  check(pdms_log_spaced(f_min, f_max, ppd, nullptr, 0, &n), "frequency grid");
  std::vector<double> freqs(n);
  check(pdms_log_spaced(f_min, f_max, ppd, freqs.data(), n, &n), "frequency grid");

  pdms_bode_settings s = pdms_bode_default();
  s.amplitude = amplitude;
  s.clock = cfg.clock;
  s.analysis_rate_hz = cfg.analysis_rate_hz;
  s.full_scale_rate = cfg.full_scale_rate;
  s.threads = thread_count(common.threads);
  std::vector<pdms_bode_point> pts(n);
  check(pdms_bode_sweep_sbpf(&cfg.psi, freqs.data(), n, &s, pts.data()), "sweep");
  write_atomic(dir / "bode.csv", [&](const char* tmp) {
    check(pdms_write_bode_csv(pts.data(), pts.size(), tmp), "write bode.csv");
  });

  const auto peak = std::max_element(pts.begin(), pts.end(),
                                     [](const auto& a, const auto& b) {
                                       return a.gain_db < b.gain_db;
                                     });
  std::cout << "points=" << pts.size() << "\n"
            << "peak_freq_hz=" << num(peak->freq_hz) << "\n"
            << "peak_gain_db=" << num(peak->gain_db) << "\n";
  return 0;
}

int cmd_nas(const Common& common, const std::string& sine, const std::string& wav) {
  const pdms_run_config cfg = load_config(common);
  const fs::path dir = output_dir(common, cfg);
  Stimulus stim = load_stimulus(sine, wav, cfg);
  const bool binaural = cfg.nas.binaural != 0;
  if (binaural && stim.ears.size() < 2) {
    if (!sine.empty()) {
      // An inline tone is presented identically to both ears.
      pdms_waveform* copy = nullptr;
      const pdms_waveform* w = stim.ears.front().get();
      check(pdms_waveform_create(pdms_waveform_samples(w), pdms_waveform_size(w),
                                 pdms_waveform_rate(w), &copy),
            "copy stimulus");
      stim.ears.emplace_back(copy);
    } else {
      throw CliError("binaural NAS needs a stereo WAV input", static_cast<int>(PDMS_ERR_ARGUMENT) + 1);
    }
  }

  pdms_nas* raw_nas = nullptr;
  check(pdms_nas_build(&cfg.nas, &raw_nas), "nas");
  Nas nas(raw_nas);

  Chain left = front_end(stim.ears[0].get(), cfg);
  std::optional<Chain> right;
  if (binaural) right = front_end(stim.ears[1].get(), cfg);

  pdms_stream* raw = nullptr;
  check(pdms_nas_process(nas.get(), left.frontend.get(),
                         right ? right->frontend.get() : nullptr,
                         thread_count(common.threads), &raw),
        "nas");
  Stream events(raw);
  write_events(dir, "nas", events.get(), cfg);

  pdms_cochleogram* raw_c = nullptr;
  check(pdms_cochleogram_create(events.get(), &cfg.nas, cfg.bin_ms,
                                pdms_pdm_end_cycle(left.pdm.get()), &raw_c),
        "cochleogram");
  Cochlea coch(raw_c);
  std::uint32_t ears = 0;
  std::uint32_t channels = 0;
  std::uint32_t bins = 0;
  pdms_cochleogram_shape(coch.get(), &ears, &channels, &bins, nullptr);
  for (std::uint32_t e = 0; e < ears; ++e) {
    const std::string suffix = ears == 1 ? "" : (e == 0 ? "_left" : "_right");
    write_atomic(dir / ("cochleogram" + suffix + ".csv"), [&](const char* tmp) {
      check(pdms_write_cochleogram_csv(coch.get(), e, tmp), "write cochleogram");
    });
    write_atomic(dir / ("sonogram" + suffix + ".csv"), [&](const char* tmp) {
      check(pdms_write_sonogram_csv(coch.get(), e, tmp), "write sonogram");
    });
  }

  // Most active channel of the first ear.
  std::vector<std::uint64_t> totals(channels, 0);
  for (std::uint32_t c = 0; c < channels; ++c) {
    for (std::uint32_t b = 0; b < bins; ++b) {
      std::uint64_t v = 0;
      check(pdms_cochleogram_count(coch.get(), 0, c, b, &v), "cochleogram");
      totals[c] += v;
    }
  }
  const auto top = static_cast<std::uint32_t>(
      std::max_element(totals.begin(), totals.end()) - totals.begin());
  double centre = 0.0;
  check(pdms_nas_band_center(nas.get(), top, &centre), "nas");
  std::cout << "events=" << pdms_stream_size(events.get()) << "\n"
            << "channels=" << channels << "\n"
            << "bins=" << bins << "\n"
            << "dominant_channel=" << top << "\n"
            << "dominant_center_hz=" << num(centre) << "\n";
  return 0;
}

int cmd_aer_info(const Common& common, const std::string& path) {
  const pdms_run_config cfg = load_config(common);
  pdms_stream* raw = nullptr;
  check(pdms_read_aer_file(path.c_str(), cfg.clock, &raw), path);
  Stream s(raw);
  const std::size_t n = pdms_stream_size(s.get());
  const double duration = static_cast<double>(pdms_stream_end_cycle(s.get())) /
                          static_cast<double>(cfg.clock.core_clock_hz);
  std::map<std::uint32_t, std::uint64_t> per_address;
  std::vector<pdms_event> buf(4096);
  for (std::size_t first = 0; first < n;) {
    std::size_t got = 0;
    check(pdms_stream_copy(s.get(), first, buf.data(), buf.size(), &got), "read");
    for (std::size_t i = 0; i < got; ++i) ++per_address[buf[i].address];
    first += got;
  }
  std::cout << "events=" << n << "\n"
            << "duration_s=" << num(duration) << "\n";
  for (const auto& [addr, count] : per_address) {
    const double rate = duration > 0.0 ? static_cast<double>(count) / duration : 0.0;
    std::cout << "address " << addr << ": count=" << count
              << " rate_hz=" << num(rate) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate PDM-to-spikes interface and cochlea simulator"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "INI run configuration");
  app.add_option("--out", common.out_dir, "output directory (overrides io.output_dir)");
  app.add_option("--threads", common.threads, "worker threads (PDMS_THREADS wins)");

  std::string sine;
  std::string wav;
  double f0 = 0.0;
  auto* psi = app.add_subcommand("psi", "front-end + band-pass, metrics and events");
  psi->add_option("--sine", sine, "inline tone: freq,amplitude,duration");
  psi->add_option("--wav", wav, "16-bit PCM WAV input");
  psi->add_option("--f0", f0, "fundamental for THD/SNR with WAV input");

  double f_min = 20.0;
  double f_max = 20'000.0;
  unsigned ppd = 10;
  double amplitude = 0.5;
  auto* sweep = app.add_subcommand("sweep", "frequency response of the band-pass");
  sweep->add_option("--f-min", f_min, "lowest frequency in Hz");
  sweep->add_option("--f-max", f_max, "highest frequency in Hz");
  sweep->add_option("--ppd", ppd, "points per decade");
  sweep->add_option("--amplitude", amplitude, "tone amplitude in (0, 1]");

  auto* nas = app.add_subcommand("nas", "cochlea filter bank, cochleogram and sonogram");
  nas->add_option("--sine", sine, "inline tone: freq,amplitude,duration");
  nas->add_option("--wav", wav, "16-bit PCM WAV input (stereo when binaural)");

  std::string aer_path;
  auto* info = app.add_subcommand("aer-info", "summarise an AER file");
  info->add_option("file", aer_path, "AER file")->required();

  // Global options are accepted after the subcommand too.
  for (auto* sub : {psi, sweep, nas, info}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*psi) return cmd_psi(common, sine, wav, f0);
    if (*sweep) return cmd_sweep(common, f_min, f_max, ppd, amplitude);
    if (*nas) return cmd_nas(common, sine, wav);
    if (*info) return cmd_aer_info(common, aer_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
