#ifndef ENTROPY_FORGE_H
#define ENTROPY_FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum EfStatus {
  EF_STATUS_OK = 0,
  EF_STATUS_NULL_POINTER = 1,
  EF_STATUS_INVALID_UTF8 = 2,
  EF_STATUS_PARAMETER = 3,
  EF_STATUS_INSUFFICIENT_DATA = 4,
  EF_STATUS_OVERFLOW = 5,
  EF_STATUS_ESTIMATION = 6,
  EF_STATUS_EXHAUSTED = 7,
  EF_STATUS_VALIDATION = 8,
  EF_STATUS_UNSUPPORTED = 9,
  EF_STATUS_NON_CONVERGENCE = 10,
  EF_STATUS_INTEGRATION = 11,
  EF_STATUS_FORMAT = 12,
  EF_STATUS_IO = 13,
  EF_STATUS_JSON = 14,
  EF_STATUS_PANIC = 15,
} EfStatus;

/**
 * Continuous health monitor handle.
 */
typedef struct EfHealthMonitor EfHealthMonitor;

/**
 * Random bit source handle.
 */
typedef struct EfRandomSource EfRandomSource;

/**
 * Symbol stream handle.
 */
typedef struct EfStream EfStream;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *ef_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ef_version(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ef_string_free(char *s);

/**
 * Builds a stream from `len` symbols of width `n` bits.
 *
 * # Safety
 * `symbols` must point to `len` readable values; `out` must be writable.
 */
enum EfStatus ef_stream_from_symbols(uint8_t n,
                                     const uint16_t *symbols,
                                     size_t len,
                                     struct EfStream **out);

/**
 * Simulates the device and extracts exactly `count` symbols.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be writable.
 */
enum EfStatus ef_stream_simulate(const char *device_json,
                                 const char *extraction_json,
                                 size_t count,
                                 struct EfStream **out);

/**
 * Reads a packed stream file and its sidecar.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum EfStatus ef_stream_read(const char *path, struct EfStream **out);

/**
 * Writes a stream as a packed file plus sidecar.
 *
 * # Safety
 * `stream` must be a live handle; `path` must be NUL-terminated.
 */
enum EfStatus ef_stream_write(const struct EfStream *stream, const char *path);

/**
 * Number of symbols in the stream; 0 for null.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
size_t ef_stream_len(const struct EfStream *stream);

/**
 * Symbol width in bits; 0 for null.
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
uint8_t ef_stream_bits(const struct EfStream *stream);

/**
 * Copies up to `cap` symbols into `buf` and stores the number copied.
 *
 * # Safety
 * `buf` must have room for `cap` values; `written` must be writable.
 */
enum EfStatus ef_stream_copy_symbols(const struct EfStream *stream,
                                     uint16_t *buf,
                                     size_t cap,
                                     size_t *written);

/**
 * # Safety
 * `stream` must be null or a live handle, not used afterwards.
 */
void ef_stream_free(struct EfStream *stream);

/**
 * Shannon entropy of the symbol histogram, bits per symbol.
 *
 * # Safety
 * `stream` must be a live handle; `out` must be writable.
 */
enum EfStatus ef_shannon_entropy(const struct EfStream *stream, double *out);

/**
 * Most-common-value min-entropy, bits per symbol.
 *
 * # Safety
 * `stream` must be a live handle; `out` must be writable.
 */
enum EfStatus ef_min_entropy(const struct EfStream *stream, double *out);

/**
 * Runs the IID assessment and returns the report as JSON.
 *
 * # Safety
 * `stream` must be a live handle; `config_json` null or NUL-terminated;
 * `report_json` writable. Free the report with [`ef_string_free`].
 */
enum EfStatus ef_assess(const struct EfStream *stream, const char *config_json, char **report_json);

/**
 * Monitor for a source claiming `h_min` bits per symbol.
 *
 * # Safety
 * `out` must be writable.
 */
enum EfStatus ef_health_new(double h_min,
                            size_t window,
                            double alpha,
                            struct EfHealthMonitor **out);

/**
 * Feeds `len` symbols and stores the number of new alarms from both tests.
 *
 * # Safety
 * `monitor` must be a live handle; `symbols` must hold `len` values;
 * `alarms` null or writable.
 */
enum EfStatus ef_health_feed(struct EfHealthMonitor *monitor,
                             const uint16_t *symbols,
                             size_t len,
                             uint64_t *alarms);

/**
 * Cutoffs and alarm positions so far, as JSON.
 *
 * # Safety
 * `monitor` must be a live handle; `report_json` writable.
 */
enum EfStatus ef_health_report(const struct EfHealthMonitor *monitor, char **report_json);

/**
 * # Safety
 * `monitor` must be null or a live handle, not used afterwards.
 */
void ef_health_free(struct EfHealthMonitor *monitor);

/**
 * Source that replays the packed bits of a stream.
 *
 * # Safety
 * `stream` must be a live handle; `out` writable.
 */
enum EfStatus ef_source_from_stream(const struct EfStream *stream, struct EfRandomSource **out);

/**
 * Source over `len` raw bytes, most significant bit first.
 *
 * # Safety
 * `bytes` must hold `len` values; `out` writable.
 */
enum EfStatus ef_source_from_bytes(const uint8_t *bytes, size_t len, struct EfRandomSource **out);

/**
 * Uniform integer in `[0, m)`.
 *
 * # Safety
 * `source` must be a live handle; `out` writable.
 */
enum EfStatus ef_draw_uniform(struct EfRandomSource *source, uint64_t m, uint64_t *out);

/**
 * Bernoulli draw with success probability `p`; stores 1 or 0.
 *
 * # Safety
 * `source` must be a live handle; `out` writable.
 */
enum EfStatus ef_draw_bernoulli(struct EfRandomSource *source, double p, uint8_t *out);

/**
 * Bits consumed so far; 0 for null.
 *
 * # Safety
 * `source` must be null or a live handle.
 */
uint64_t ef_source_consumed(const struct EfRandomSource *source);

/**
 * # Safety
 * `source` must be null or a live handle, not used afterwards.
 */
void ef_source_free(struct EfRandomSource *source);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTROPY_FORGE_H */
