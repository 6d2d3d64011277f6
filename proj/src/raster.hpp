#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace floodsim {

enum class RasterFormat { ascii_grid, raw_f32 };

RasterFormat raster_format_from_string(const std::string& s);
const char* to_string(RasterFormat f);

// Rectangular row-major float32 grid. Row 0 is the north edge, column 0 the
// west edge; origin_x/origin_y locate the south-west corner, matching the
// ESRI ASCII grid header convention.
struct Raster {
  int64_t rows = 0;
  int64_t cols = 0;
  double cell_size = 1.0;
  float nodata = -9999.0f;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<float> values;

  float at(int64_t r, int64_t c) const { return values[r * cols + c]; }
  float& at(int64_t r, int64_t c) { return values[r * cols + c]; }
  int64_t cell_count() const { return rows * cols; }
};

Raster make_raster(int64_t rows, int64_t cols, double cell_size, float fill = 0.0f);

// Formats:
//   ascii_grid  ESRI-style text: ncols/nrows/xllcorner/yllcorner/cellsize/
//               NODATA_value header followed by row-major values.
//   raw_f32     binary payload of rows*cols little-endian float32 at <path>,
//               with a text header at <path>.hdr (rows, cols, cell_size,
//               nodata, origin_x, origin_y as "key value" lines).
Raster load_raster(const std::string& path, RasterFormat format);
void write_raster(const Raster& r, const std::string& path, RasterFormat format);

struct Dims {
  int64_t rows = 0;
  int64_t cols = 0;
};

// Output dims of downsample_mean for the given factor, accounting for the
// edge-replication padding applied when factor does not divide the dims.
Dims downsample_dims(int64_t rows, int64_t cols, int64_t factor);

// Block mean over factor x factor blocks; cell_size scales by factor.
// Non-divisible dims are padded by edge replication first. Block sums
// accumulate in double and round once to float32, so the result is
// independent of traversal order.
Raster downsample_mean(const Raster& r, int64_t factor);

struct PadRecord {
  int64_t orig_rows = 0;
  int64_t orig_cols = 0;
};

// Pads rows up to a multiple of cy and cols up to a multiple of cx by
// replicating the last row/column, so a cx-by-cy partition tiles evenly.
std::pair<Raster, PadRecord> pad_to_divisible(const Raster& r, int64_t cx, int64_t cy);

// Inverse of pad_to_divisible on the original extent.
Raster crop_to_record(const Raster& r, const PadRecord& rec);

// A DEM entering the simulation must be complete: any nodata or nonfinite
// cell is a hard error.
void validate_dem(const Raster& r);

}  // namespace floodsim
