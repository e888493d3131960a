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

// Exercises the shared library through its C interface only.

#include "pdmspikes/pdmspikes.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("pdms_capi_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

pdms_stream* make_stream(const std::vector<pdms_event>& ev) {
  pdms_stream* s = nullptr;
  EXPECT_EQ(pdms_stream_create(ev.data(), ev.size(), pdms_clock_default(), &s), PDMS_OK);
  return s;
}

pdms_stream* tone_spikes(double f, double amp, double dur) {
  pdms_waveform* w = nullptr;
  EXPECT_EQ(pdms_sine(f, amp, dur, 3'125'000.0, &w), PDMS_OK);
  pdms_pdm* p = nullptr;
  EXPECT_EQ(pdms_modulate(w, pdms_clock_default(), &p), PDMS_OK);
  pdms_stream* s = nullptr;
  EXPECT_EQ(pdms_frontend(p, &s), PDMS_OK);
  pdms_pdm_free(p);
  pdms_waveform_free(w);
  return s;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STRNE(pdms_version(), "");
  EXPECT_STREQ(pdms_status_name(PDMS_OK), "ok");
  EXPECT_STRNE(pdms_status_name(PDMS_ERR_FORMAT), pdms_status_name(PDMS_ERR_IO));
}

TEST(CApi, StreamValidationReportsError) {
  const std::vector<pdms_event> bad{{10, 1, 1}, {5, 1, 1}};
  pdms_stream* s = nullptr;
  EXPECT_EQ(pdms_stream_create(bad.data(), bad.size(), pdms_clock_default(), &s),
            PDMS_ERR_ARGUMENT);
  EXPECT_EQ(s, nullptr);
  EXPECT_STRNE(pdms_last_error(), "");
  const std::vector<pdms_event> wrong_parity{{10, 1, -1}};
  EXPECT_NE(pdms_stream_create(wrong_parity.data(), 1, pdms_clock_default(), &s), PDMS_OK);
}

TEST(CApi, NullArgumentsAreRejected) {
  pdms_stream* s = nullptr;
  EXPECT_EQ(pdms_stream_create(nullptr, 3, pdms_clock_default(), &s), PDMS_ERR_ARGUMENT);
  EXPECT_EQ(pdms_sbpf(nullptr, nullptr, &s), PDMS_ERR_ARGUMENT);
  pdms_stream_free(nullptr);
  pdms_waveform_free(nullptr);
}

TEST(CApi, StreamAccessAndRate) {
  std::vector<pdms_event> ev;
  for (uint64_t i = 0; i < 100; ++i) ev.push_back({i * 500, 1, 1});
  pdms_stream* s = make_stream(ev);
  EXPECT_EQ(pdms_stream_size(s), 100u);
  EXPECT_EQ(pdms_stream_end_cycle(s), 49'501u);
  pdms_event e{};
  EXPECT_EQ(pdms_stream_get(s, 99, &e), PDMS_OK);
  EXPECT_EQ(e.t, 49'500u);
  EXPECT_EQ(pdms_stream_get(s, 100, &e), PDMS_ERR_ARGUMENT);
  double rate = 0;
  EXPECT_EQ(pdms_rate_of(s, 0, 50'000, &rate), PDMS_OK);
  EXPECT_DOUBLE_EQ(rate, 100'000.0);
  std::vector<pdms_event> buf(30);
  size_t copied = 0;
  EXPECT_EQ(pdms_stream_copy(s, 80, buf.data(), buf.size(), &copied), PDMS_OK);
  EXPECT_EQ(copied, 20u);
  EXPECT_EQ(buf[0].t, 40'000u);
  pdms_stream_free(s);
}

TEST(CApi, FileRoundTrips) {
  TempDir dir;
  const std::vector<pdms_event> ev{{0, 3, 1}, {50, 2, -1}, {7'000, 1, 1}};
  pdms_stream* s = make_stream(ev);
  uint64_t bytes = 0;
  ASSERT_EQ(pdms_write_aer_file(s, dir.file("a.aer").c_str(), &bytes), PDMS_OK);
  EXPECT_EQ(bytes, fs::file_size(dir.file("a.aer")));
  pdms_stream* r = nullptr;
  ASSERT_EQ(pdms_read_aer_file(dir.file("a.aer").c_str(), pdms_clock_default(), &r), PDMS_OK);
  EXPECT_EQ(pdms_stream_size(r), 3u);
  pdms_stream_free(r);

  ASSERT_EQ(pdms_write_csv_file(s, dir.file("a.csv").c_str()), PDMS_OK);
  ASSERT_EQ(pdms_read_csv_file(dir.file("a.csv").c_str(), pdms_clock_default(), &r), PDMS_OK);
  for (size_t i = 0; i < ev.size(); ++i) {
    pdms_event e{};
    pdms_stream_get(r, i, &e);
    EXPECT_EQ(e.t, ev[i].t);
    EXPECT_EQ(e.address, ev[i].address);
    EXPECT_EQ(e.polarity, ev[i].polarity);
  }
  pdms_stream_free(r);
  pdms_stream_free(s);

  std::ofstream(dir.file("trunc.aer"), std::ios::binary) << "#!AER-DAT2.0\r\n" << std::string(12, '\0');
  EXPECT_EQ(pdms_read_aer_file(dir.file("trunc.aer").c_str(), pdms_clock_default(), &r),
            PDMS_ERR_FORMAT);
  EXPECT_EQ(pdms_last_error_index(), 1);
  EXPECT_EQ(pdms_read_aer_file(dir.file("missing.aer").c_str(), pdms_clock_default(), &r),
            PDMS_ERR_IO);
}

TEST(CApi, WavRoundTripAndMono) {
  TempDir dir;
  pdms_waveform* w = nullptr;
  ASSERT_EQ(pdms_sine(440, 0.5, 0.01, 16'000, &w), PDMS_OK);
  ASSERT_EQ(pdms_write_wav(dir.file("m.wav").c_str(), w, nullptr), PDMS_OK);
  pdms_waveform* l = nullptr;
  pdms_waveform* r = reinterpret_cast<pdms_waveform*>(1);
  ASSERT_EQ(pdms_load_wav(dir.file("m.wav").c_str(), &l, &r), PDMS_OK);
  EXPECT_EQ(r, nullptr);
  ASSERT_EQ(pdms_waveform_size(l), pdms_waveform_size(w));
  for (size_t i = 0; i < pdms_waveform_size(w); ++i) {
    EXPECT_NEAR(pdms_waveform_samples(l)[i], pdms_waveform_samples(w)[i], 1.0 / 32768);
  }
  pdms_waveform* up = nullptr;
  ASSERT_EQ(pdms_resample_zoh(l, 3'125'000.0, &up), PDMS_OK);
  EXPECT_EQ(pdms_waveform_size(up), 31'250u);
  pdms_waveform_free(up);
  pdms_waveform_free(l);
  pdms_waveform_free(w);
}

TEST(CApi, PsiChainEndToEnd) {
  pdms_stream* fe = tone_spikes(500, 0.5, 0.1);
  EXPECT_EQ(pdms_stream_size(fe), 312'500u);
  const pdms_sbpf_config cfg = pdms_sbpf_default();
  EXPECT_EQ(cfg.hold_cycles, 128u);
  pdms_stream* out = nullptr;
  ASSERT_EQ(pdms_sbpf(fe, &cfg, &out), PDMS_OK);
  uint64_t zc = 0;
  ASSERT_EQ(pdms_zero_crossings(out, &zc), PDMS_OK);
  EXPECT_NEAR(static_cast<double>(zc), 100.0, 2.0);
  pdms_waveform* rec = nullptr;
  ASSERT_EQ(pdms_reconstruct(out, 100'000, 0, 0, &rec), PDMS_OK);
  pdms_spectral thd{};
  ASSERT_EQ(pdms_thd(rec, 500, 9, &thd), PDMS_OK);
  EXPECT_LT(thd.db, -35);
  EXPECT_EQ(thd.f0_not_peak, 0);
  pdms_waveform_free(rec);
  pdms_stream_free(out);
  pdms_stream_free(fe);
}

TEST(CApi, CutoffParams) {
  uint32_t g = 0;
  uint32_t n = 0;
  double f = 0;
  ASSERT_EQ(pdms_cutoff_to_params(12'000, 50'000'000, &g, &n, &f), PDMS_OK);
  EXPECT_EQ(g, 99u);
  EXPECT_EQ(n, 16u);
  EXPECT_EQ(pdms_cutoff_to_params(0.1, 50'000'000, &g, &n, &f), PDMS_ERR_ARGUMENT);
}

TEST(CApi, NasAndCochleogram) {
  pdms_nas_config cfg = pdms_nas_default();
  EXPECT_EQ(cfg.num_channels, 64u);
  cfg.num_channels = 8;
  pdms_nas* nas = nullptr;
  ASSERT_EQ(pdms_nas_build(&cfg, &nas), PDMS_OK);
  double center = 0;
  ASSERT_EQ(pdms_nas_band_center(nas, 0, &center), PDMS_OK);
  EXPECT_GT(center, 5'000);
  EXPECT_EQ(pdms_nas_band_center(nas, 8, &center), PDMS_ERR_ARGUMENT);
  pdms_stream* in = tone_spikes(1'000, 0.5, 0.02);
  pdms_stream* out = nullptr;
  ASSERT_EQ(pdms_nas_process(nas, in, nullptr, 1, &out), PDMS_OK);
  pdms_cochleogram* c = nullptr;
  ASSERT_EQ(pdms_cochleogram_create(out, &cfg, 5, 0, &c), PDMS_OK);
  uint32_t ears = 0;
  uint32_t channels = 0;
  uint32_t bins = 0;
  double bin_s = 0;
  pdms_cochleogram_shape(c, &ears, &channels, &bins, &bin_s);
  EXPECT_EQ(ears, 1u);
  EXPECT_EQ(channels, 8u);
  // 5 ms bins over the output span (the hold window pushes it past 20 ms).
  EXPECT_EQ(bins, (pdms_stream_end_cycle(out) + 249'999) / 250'000);
  uint64_t total = 0;
  for (uint32_t ch = 0; ch < channels; ++ch) {
    for (uint32_t b = 0; b < bins; ++b) {
      uint64_t v = 0;
      ASSERT_EQ(pdms_cochleogram_count(c, 0, ch, b, &v), PDMS_OK);
      total += v;
    }
  }
  EXPECT_EQ(total, pdms_stream_size(out));
  pdms_cochleogram_free(c);
  pdms_stream_free(out);
  // A binaural bank needs both ears.
  cfg.binaural = 1;
  pdms_nas* bin = nullptr;
  ASSERT_EQ(pdms_nas_build(&cfg, &bin), PDMS_OK);
  EXPECT_EQ(pdms_nas_process(bin, in, nullptr, 1, &out), PDMS_ERR_ARGUMENT);
  pdms_nas_free(bin);
  pdms_stream_free(in);
  pdms_nas_free(nas);
}

TEST(CApi, BodeFrontEndIsFlat) {
  size_t count = 0;
  ASSERT_EQ(pdms_log_spaced(20, 20'000, 10, nullptr, 0, &count), PDMS_OK);
  EXPECT_EQ(count, 31u);
  const double freqs[] = {200, 2'000};
  pdms_bode_point pts[2];
  const pdms_bode_settings st = pdms_bode_default();
  ASSERT_EQ(pdms_bode_sweep_sbpf(nullptr, freqs, 2, &st, pts), PDMS_OK);
  for (const auto& p : pts) EXPECT_NEAR(p.gain_db, 0.0, 1e-9);
}

TEST(CApi, FormatNumber) {
  char buf[32];
  EXPECT_EQ(pdms_format_number(-56.26341, buf, sizeof buf), std::strlen("-56.2634"));
  EXPECT_STREQ(buf, "-56.2634");
  char tiny[4];
  const size_t need = pdms_format_number(123.456, tiny, sizeof tiny);
  EXPECT_EQ(need, std::strlen("123.456"));
  EXPECT_EQ(std::strlen(tiny), 3u);
}

TEST(CApi, RunConfig) {
  TempDir dir;
  pdms_run_config c;
  pdms_run_config_default(&c);
  EXPECT_EQ(c.psi.hold_cycles, 128u);
  EXPECT_EQ(c.want_aer, 1);
  std::ofstream(dir.file("ok.ini")) << "[nas]\nnum_channels = 16\n[io]\nformats = aer\n";
  ASSERT_EQ(pdms_run_config_load(dir.file("ok.ini").c_str(), &c), PDMS_OK);
  EXPECT_EQ(c.nas.num_channels, 16u);
  EXPECT_EQ(c.want_csv, 0);
  std::ofstream(dir.file("bad.ini")) << "[nas]\nchannels = 16\n";
  EXPECT_EQ(pdms_run_config_load(dir.file("bad.ini").c_str(), &c), PDMS_ERR_CONFIG);
  EXPECT_NE(std::string(pdms_last_error()).find("nas.channels"), std::string::npos);
}

}  // namespace
