/* floodsim: 2D inertial shallow-water flood simulator.
 *
 * C interface of the shared library. All functions return FSIM_OK on
 * success; on failure they return an error code and leave a message
 * retrievable with fsim_last_error() (thread-local). Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching *_free function.
 */
#ifndef FLOODSIM_H
#define FLOODSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FSIM_API __declspec(dllexport)
#else
#define FSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsim_status {
  FSIM_OK = 0,
  FSIM_ERR_INVALID_ARGUMENT = 1,
  FSIM_ERR_IO = 2,
  FSIM_ERR_PARSE = 3,
  FSIM_ERR_RUNTIME = 4
} fsim_status;

typedef struct fsim_raster fsim_raster;
typedef struct fsim_config fsim_config;
typedef struct fsim_result fsim_result;

FSIM_API const char* fsim_version(void);

/* Message describing the most recent failure on this thread; never NULL. */
FSIM_API const char* fsim_last_error(void);

/* Frees strings returned through char** out-parameters. */
FSIM_API void fsim_string_free(char* s);

/* ---- rasters ----------------------------------------------------------- */

/* format: "ascii_grid" or "raw_f32". */
FSIM_API fsim_status fsim_raster_load(const char* path, const char* format, fsim_raster** out);
FSIM_API fsim_status fsim_raster_write(const fsim_raster* r, const char* path,
                                       const char* format);
FSIM_API fsim_status fsim_raster_downsample(const fsim_raster* r, int64_t factor,
                                            fsim_raster** out);
FSIM_API void fsim_raster_free(fsim_raster* r);

FSIM_API int64_t fsim_raster_rows(const fsim_raster* r);
FSIM_API int64_t fsim_raster_cols(const fsim_raster* r);
FSIM_API double fsim_raster_cell_size(const fsim_raster* r);
/* Row-major rows*cols float32 values, valid until the raster is freed. */
FSIM_API const float* fsim_raster_values(const fsim_raster* r);

/* ---- simulation -------------------------------------------------------- */

FSIM_API fsim_status fsim_config_load(const char* path, fsim_config** out);
FSIM_API fsim_status fsim_config_parse(const char* text, fsim_config** out);
FSIM_API void fsim_config_free(fsim_config* c);

/* Runs the configured simulation to completion, writing snapshots and
 * reports when the config names an output directory. */
FSIM_API fsim_status fsim_simulate(const fsim_config* cfg, fsim_result** out);
FSIM_API void fsim_result_free(fsim_result* r);

FSIM_API int64_t fsim_result_steps(const fsim_result* r);
FSIM_API double fsim_result_volume(const fsim_result* r);        /* final, m^3 */
FSIM_API double fsim_result_mass_residual(const fsim_result* r); /* relative  */
/* Multi-line "key value" summary. */
FSIM_API fsim_status fsim_result_summary(const fsim_result* r, char** out_text);

/* ---- benchmarking ------------------------------------------------------ */

typedef struct fsim_bench_options {
  const int32_t* resolutions;   /* cell sizes in meters */
  size_t n_resolutions;
  const int32_t* worker_counts;
  size_t n_worker_counts;
  int64_t steps;                /* timed step budget */
  int64_t warmup;               /* untimed steps, default 50 when 0 */
  int64_t base_rows;            /* synthetic terrain dims (1 m), default 1024 */
  int64_t base_cols;
  int32_t all_layouts;          /* 0: strip layouts only */
  const char* dem_path;         /* optional real DEM instead of synthetic */
  const char* dem_format;
} fsim_bench_options;

/* Runs the benchmark matrix and writes records to csv_path. */
FSIM_API fsim_status fsim_bench(const fsim_bench_options* opt, const char* csv_path);

/* Factorizations of n_workers with their internal-edge counts, as text. */
FSIM_API fsim_status fsim_layouts_text(int32_t n_workers, char** out_text);

/* Weak/strong scaling tables computed from a benchmark CSV. */
FSIM_API fsim_status fsim_report_from_csv(const char* csv_path, char** out_text);

/* Collapse-plot CSV (points per worker vs steps/s) from a benchmark CSV. */
FSIM_API fsim_status fsim_scaling_curve_from_csv(const char* csv_path, char** out_text);

#ifdef __cplusplus
}
#endif

#endif /* FLOODSIM_H */
