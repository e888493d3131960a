/* Copyright 2026 The pdmspikes Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libpdmspikes.
 *
 * Every fallible call returns a pdms_status. On failure the message and,
 * for format errors, the offending index are available from
 * pdms_last_error() / pdms_last_error_index() on the calling thread.
 * Objects are opaque handles released with their *_free function; output
 * handles are only written on success. Handles are immutable once created
 * and may be shared across threads.
 */

#ifndef PDMSPIKES_PDMSPIKES_H
#define PDMSPIKES_PDMSPIKES_H

#include <stddef.h>
#include <stdint.h>

#if defined(PDMS_BUILDING_LIBRARY)
#define PDMS_API __attribute__((visibility("default")))
#else
#define PDMS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pdms_status {
  PDMS_OK = 0,
  PDMS_ERR_ARGUMENT = 1,
  PDMS_ERR_FORMAT = 2,
  PDMS_ERR_IO = 3,
  PDMS_ERR_CONFIG = 4,
  PDMS_ERR_INTERNAL = 5
} pdms_status;

PDMS_API const char* pdms_version(void);
PDMS_API const char* pdms_status_name(pdms_status status);
/* Message of the last failure on this thread; "" if none. */
PDMS_API const char* pdms_last_error(void);
/* Event or byte index of the last format error, -1 if unknown. */
PDMS_API int64_t pdms_last_error_index(void);
/* Six significant digits, positional notation, NUL-terminated. Returns the
 * length the full text needs, like snprintf. */
PDMS_API size_t pdms_format_number(double x, char* buf, size_t capacity);

/* ---- clock and events ---- */

typedef struct pdms_clock {
  uint64_t core_clock_hz;
  uint32_t pdm_divisor;
} pdms_clock;

PDMS_API pdms_clock pdms_clock_default(void);

typedef struct pdms_event {
  uint64_t t; /* core-clock cycles */
  uint32_t address;
  int8_t polarity; /* +1 or -1 */
} pdms_event;

typedef struct pdms_stream pdms_stream;

PDMS_API pdms_status pdms_stream_create(const pdms_event* events, size_t count,
                                        pdms_clock clock, pdms_stream** out);
PDMS_API void pdms_stream_free(pdms_stream* s);
PDMS_API size_t pdms_stream_size(const pdms_stream* s);
PDMS_API pdms_clock pdms_stream_clock(const pdms_stream* s);
/* One past the last timestamp, 0 when empty. */
PDMS_API uint64_t pdms_stream_end_cycle(const pdms_stream* s);
PDMS_API pdms_status pdms_stream_get(const pdms_stream* s, size_t index,
                                     pdms_event* out);
/* Copies up to `capacity` events starting at `first`; *copied receives the
 * number written. */
PDMS_API pdms_status pdms_stream_copy(const pdms_stream* s, size_t first,
                                      pdms_event* out, size_t capacity,
                                      size_t* copied);

/* Net rate in spikes/s over cycles [begin, end). */
PDMS_API pdms_status pdms_rate_of(const pdms_stream* s, uint64_t begin,
                                  uint64_t end, double* out);
PDMS_API pdms_status pdms_select_channel(const pdms_stream* s,
                                         uint32_t channel, pdms_stream** out);

/* AER (32-bit address, 32-bit microsecond timestamp, big-endian) and the
 * cycle-exact CSV format "t_cycles,address,polarity". */
PDMS_API pdms_status pdms_write_aer_file(const pdms_stream* s, const char* path,
                                         uint64_t* bytes_written);
PDMS_API pdms_status pdms_read_aer_file(const char* path, pdms_clock clock,
                                        pdms_stream** out);
PDMS_API pdms_status pdms_write_csv_file(const pdms_stream* s, const char* path);
PDMS_API pdms_status pdms_read_csv_file(const char* path, pdms_clock clock,
                                        pdms_stream** out);

/* ---- stimulus ---- */

typedef struct pdms_waveform pdms_waveform;
typedef struct pdms_pdm pdms_pdm;

PDMS_API pdms_status pdms_waveform_create(const double* samples, size_t count,
                                          double sample_rate_hz,
                                          pdms_waveform** out);
PDMS_API void pdms_waveform_free(pdms_waveform* w);
PDMS_API size_t pdms_waveform_size(const pdms_waveform* w);
PDMS_API double pdms_waveform_rate(const pdms_waveform* w);
/* Borrowed pointer, valid while `w` lives. */
PDMS_API const double* pdms_waveform_samples(const pdms_waveform* w);

PDMS_API pdms_status pdms_sine(double freq_hz, double amplitude,
                               double duration_s, double sample_rate_hz,
                               pdms_waveform** out);
/* 16-bit PCM WAV. *right is set to NULL for mono files. */
PDMS_API pdms_status pdms_load_wav(const char* path, pdms_waveform** left,
                                   pdms_waveform** right);
PDMS_API pdms_status pdms_write_wav(const char* path, const pdms_waveform* left,
                                    const pdms_waveform* right);
PDMS_API pdms_status pdms_resample_zoh(const pdms_waveform* w,
                                       double target_rate_hz,
                                       pdms_waveform** out);

/* Second-order sigma-delta modulator; w must be at the PDM clock rate. */
PDMS_API pdms_status pdms_modulate(const pdms_waveform* w, pdms_clock clock,
                                   pdms_pdm** out);
PDMS_API void pdms_pdm_free(pdms_pdm* p);
PDMS_API size_t pdms_pdm_size(const pdms_pdm* p);
/* Core cycle one PDM period past the last bit. */
PDMS_API uint64_t pdms_pdm_end_cycle(const pdms_pdm* p);

/* One spike per PDM bit on addresses 3 (+) / 2 (-). */
PDMS_API pdms_status pdms_frontend(const pdms_pdm* p, pdms_stream** out);

/* ---- spike processing blocks ---- */

typedef struct pdms_sbpf_config {
  double f_low_hz;
  double f_high_hz;
  uint64_t hold_cycles;
} pdms_sbpf_config;

PDMS_API pdms_sbpf_config pdms_sbpf_default(void);
PDMS_API pdms_status pdms_cutoff_to_params(double cutoff_hz,
                                           uint64_t core_clock_hz,
                                           uint32_t* gain, uint32_t* n_bits,
                                           double* realized_hz);
PDMS_API pdms_status pdms_slpf(const pdms_stream* in, double cutoff_hz,
                               pdms_stream** out);
PDMS_API pdms_status pdms_hold_and_fire(const pdms_stream* a,
                                        const pdms_stream* b,
                                        uint64_t hold_cycles,
                                        pdms_stream** out);
/* Band-pass on channel 0 (addresses 1 / 0). */
PDMS_API pdms_status pdms_sbpf(const pdms_stream* in,
                               const pdms_sbpf_config* config,
                               pdms_stream** out);

/* ---- filter bank ---- */

typedef struct pdms_nas_config {
  uint32_t num_channels;
  double f_start_hz;
  double f_end_hz;
  int binaural;
  uint64_t hold_cycles;
  pdms_clock clock;
} pdms_nas_config;

typedef struct pdms_nas pdms_nas;

PDMS_API pdms_nas_config pdms_nas_default(void);
PDMS_API pdms_status pdms_nas_build(const pdms_nas_config* config,
                                    pdms_nas** out);
PDMS_API void pdms_nas_free(pdms_nas* nas);
/* Geometric band centre of a channel. */
PDMS_API pdms_status pdms_nas_band_center(const pdms_nas* nas,
                                          uint32_t channel, double* out_hz);
/* `right` may be NULL for a mono bank. threads > 1 runs ears in parallel. */
PDMS_API pdms_status pdms_nas_process(const pdms_nas* nas,
                                      const pdms_stream* left,
                                      const pdms_stream* right,
                                      unsigned threads, pdms_stream** out);

/* ---- analysis ---- */

PDMS_API pdms_status pdms_zero_crossings(const pdms_stream* s, uint64_t* out);

/* full_scale_rate <= 0 selects the PDM clock; horizon 0 means end of
 * stream. The result is a waveform handle at analysis_rate_hz. */
PDMS_API pdms_status pdms_reconstruct(const pdms_stream* s,
                                      double analysis_rate_hz,
                                      double full_scale_rate, uint64_t horizon,
                                      pdms_waveform** out);

typedef struct pdms_spectral {
  double db;
  int f0_not_peak;
} pdms_spectral;

PDMS_API pdms_status pdms_thd(const pdms_waveform* w, double f0_hz,
                              unsigned n_harmonics, pdms_spectral* out);
PDMS_API pdms_status pdms_snr(const pdms_waveform* w, double f0_hz,
                              unsigned n_harmonics, double band_hz,
                              pdms_spectral* out);
PDMS_API pdms_status pdms_write_reconstruction_csv(const pdms_waveform* w,
                                                   const char* path);

typedef struct pdms_bode_point {
  double freq_hz;
  double gain_db;
  double phase_rad;
} pdms_bode_point;

typedef struct pdms_bode_settings {
  double amplitude;
  double settle_periods;
  double measure_periods;
  double min_settle_s;
  double min_measure_s;
  double analysis_rate_hz;
  double full_scale_rate;
  pdms_clock clock;
  unsigned threads;
} pdms_bode_settings;

PDMS_API pdms_bode_settings pdms_bode_default(void);
/* round(decades * points_per_decade) + 1 points. With out == NULL only
 * *count is written. */
PDMS_API pdms_status pdms_log_spaced(double f_min, double f_max,
                                     unsigned points_per_decade, double* out,
                                     size_t capacity, size_t* count);
/* Sweeps the SBPF, or the front-end alone when config is NULL. `out` must
 * hold `count` points. */
PDMS_API pdms_status pdms_bode_sweep_sbpf(const pdms_sbpf_config* config,
                                          const double* freqs, size_t count,
                                          const pdms_bode_settings* settings,
                                          pdms_bode_point* out);
PDMS_API pdms_status pdms_write_bode_csv(const pdms_bode_point* points,
                                         size_t count, const char* path);

typedef struct pdms_cochleogram pdms_cochleogram;

PDMS_API pdms_status pdms_cochleogram_create(const pdms_stream* events,
                                             const pdms_nas_config* config,
                                             double bin_ms, uint64_t horizon,
                                             pdms_cochleogram** out);
PDMS_API void pdms_cochleogram_free(pdms_cochleogram* c);
PDMS_API void pdms_cochleogram_shape(const pdms_cochleogram* c,
                                     uint32_t* ears, uint32_t* channels,
                                     uint32_t* bins, double* bin_s);
PDMS_API pdms_status pdms_cochleogram_count(const pdms_cochleogram* c,
                                            uint32_t ear, uint32_t channel,
                                            uint32_t bin, uint64_t* out);
PDMS_API pdms_status pdms_write_cochleogram_csv(const pdms_cochleogram* c,
                                                uint32_t ear, const char* path);
PDMS_API pdms_status pdms_write_sonogram_csv(const pdms_cochleogram* c,
                                             uint32_t ear, const char* path);

/* ---- run configuration ---- */

typedef struct pdms_run_config {
  pdms_clock clock;
  pdms_sbpf_config psi;
  pdms_nas_config nas;
  double bin_ms;
  double analysis_rate_hz;
  double full_scale_rate;
  char input[1024];
  char output_dir[1024];
  int want_aer;
  int want_csv;
} pdms_run_config;

PDMS_API void pdms_run_config_default(pdms_run_config* out);
/* Parses an INI file; unknown keys fail with PDMS_ERR_CONFIG. */
PDMS_API pdms_status pdms_run_config_load(const char* path,
                                          pdms_run_config* out);

#ifdef __cplusplus
}
#endif

#endif /* PDMSPIKES_PDMSPIKES_H */
