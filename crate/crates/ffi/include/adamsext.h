#ifndef ADAMSEXT_H
#define ADAMSEXT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Chart output formats for [`adx_chart_render`].
 */
typedef enum AdxFormat {
  ADX_FORMAT_ASCII = 0,
  ADX_FORMAT_JSON = 1,
  ADX_FORMAT_SVG = 2,
} AdxFormat;

/**
 * Result codes. Zero is success.
 */
typedef enum AdxStatus {
  ADX_STATUS_OK = 0,
  ADX_STATUS_NULL_POINTER = 1,
  ADX_STATUS_INVALID_UTF8 = 2,
  ADX_STATUS_PARSE = 3,
  /**
   * The module violates the Adem relations.
   */
  ADX_STATUS_INVALID_MODULE = 4,
  ADX_STATUS_IO = 5,
  /**
   * The two Ext computations disagreed.
   */
  ADX_STATUS_CROSS_CHECK = 6,
  ADX_STATUS_INVALID_ARGUMENT = 7,
  ADX_STATUS_PANIC = 8,
} AdxStatus;

/**
 * An Adams E2 chart.
 */
typedef struct AdxChart AdxChart;

/**
 * A finite module over the Steenrod algebra.
 */
typedef struct AdxModule AdxModule;

/**
 * A minimal resolution of a module.
 */
typedef struct AdxResolution AdxResolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call into this library from the same thread.
 */
const char *adx_last_error(void);

/**
 * Parses module DSL text into `*out`.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdxStatus adx_module_parse(const char *src, struct AdxModule **out);

/**
 * Reads and parses a module file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdxStatus adx_module_load(const char *path, struct AdxModule **out);

/**
 * The cohomology of the sphere: one cell in degree 0.
 */
struct AdxModule *adx_module_sphere(void);

/**
 * Number of Adem-relation violations.
 *
 * # Safety
 * `m` must be a live module handle and `out` a valid pointer.
 */
enum AdxStatus adx_module_violations(const struct AdxModule *m, size_t *out);

/**
 * Total dimension over F2, or 0 for a null handle.
 *
 * # Safety
 * `m` must be a live module handle or NULL.
 */
size_t adx_module_dimension(const struct AdxModule *m);

/**
 * # Safety
 * `m` must come from this library and not be used afterwards. NULL is ignored.
 */
void adx_module_free(struct AdxModule *m);

/**
 * Minimal resolution of `m` through homological degree `max_s` and
 * internal degree `max_t`.
 *
 * # Safety
 * `m` must be a live module handle and `out` a valid pointer.
 */
enum AdxStatus adx_resolve(const struct AdxModule *m,
                           uint32_t max_s,
                           int32_t max_t,
                           struct AdxResolution **out);

/**
 * Dimension of Ext^{s,t}(M, F2).
 *
 * # Safety
 * `r` must be a live resolution handle and `out` a valid pointer.
 */
enum AdxStatus adx_resolution_ext_dim(const struct AdxResolution *r,
                                      uint32_t s,
                                      int32_t t,
                                      size_t *out);

/**
 * Writes the resolution to `path`.
 *
 * # Safety
 * `r` must be a live resolution handle and `path` a NUL-terminated string.
 */
enum AdxStatus adx_resolution_save(const struct AdxResolution *r, const char *path);

/**
 * Reads a resolution written by [`adx_resolution_save`], checking its
 * checksum.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AdxStatus adx_resolution_load(const char *path, struct AdxResolution **out);

/**
 * # Safety
 * `r` must come from this library and not be used afterwards. NULL is ignored.
 */
void adx_resolution_free(struct AdxResolution *r);

/**
 * Chart of Ext(M ⊗ DN, F2) for `s <= max_s` and normalized stems up to
 * `max_stem`. A NULL `n` means the sphere.
 *
 * # Safety
 * `m` must be a live module handle, `n` a live handle or NULL, and `out`
 * a valid pointer.
 */
enum AdxStatus adx_chart_build(const struct AdxModule *m,
                               const struct AdxModule *n,
                               uint32_t max_s,
                               int32_t max_stem,
                               struct AdxChart **out);

/**
 * Offset from normalized stems to the stems of maps between the spaces.
 *
 * # Safety
 * `c` must be a live chart handle or NULL (which gives 0).
 */
int32_t adx_chart_shift(const struct AdxChart *c);

/**
 * Number of classes at normalized `stem` and filtration `s`.
 *
 * # Safety
 * `c` must be a live chart handle or NULL (which gives 0).
 */
size_t adx_chart_class_count(const struct AdxChart *c, int32_t stem, uint32_t s);

/**
 * Number of classes in the whole chart.
 *
 * # Safety
 * `c` must be a live chart handle or NULL (which gives 0).
 */
size_t adx_chart_total_classes(const struct AdxChart *c);

/**
 * Renders the chart into a newly allocated string, released with
 * [`adx_string_free`].
 *
 * # Safety
 * `c` must be a live chart handle and `out` a valid pointer.
 */
enum AdxStatus adx_chart_render(const struct AdxChart *c, enum AdxFormat format, char **out);

/**
 * # Safety
 * `c` must come from this library and not be used afterwards. NULL is ignored.
 */
void adx_chart_free(struct AdxChart *c);

/**
 * # Safety
 * `s` must come from [`adx_chart_render`] and not be used afterwards.
 */
void adx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADAMSEXT_H */
