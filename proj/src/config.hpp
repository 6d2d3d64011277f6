#pragma once

#include <map>
#include <optional>
#include <string>

#include "boundary.hpp"
#include "raster.hpp"
#include "worker.hpp"

namespace floodsim {

// Full description of one simulation run. Loaded from a structured text
// file of "key = value" lines with brace-delimited nesting:
//
//   dem_path   = dem.r32
//   dem_format = raw_f32
//   dt         = 0.1
//   duration   = 172800
//   cx         = 2
//   cy         = 2
//   physics {
//     g       = 9.80665
//     h_min   = 0.001
//     manning = 0.03          # or manning_path/manning_format
//   }
//   inflow {
//     side           = west
//     fraction_start = 0.2
//     fraction_end   = 0.4
//     slope          = 0.001
//     discharge      = 0:15000    # t:Q pairs, piecewise constant
//   }
//   outflow {
//     side           = east
//     fraction_start = 0.2
//     fraction_end   = 0.4
//     slope          = 0.001
//   }
//
// '#' starts a comment. Keys inside a block are reported as "block.key".
struct SimConfig {
  std::string dem_path;
  RasterFormat dem_format = RasterFormat::raw_f32;
  int64_t downsample = 1;       // block-mean factor applied after loading
  double resolution = 0.0;      // target cell size; alternative to downsample

  double dt = 0.1;
  double start_time = 0.0;
  double duration = 0.0;
  int cx = 1;
  int cy = 1;

  double g = 9.80665;
  double h_min = 1e-3;
  double manning = 0.03;        // uniform value unless manning_path is set
  std::string manning_path;
  RasterFormat manning_format = RasterFormat::raw_f32;
  HBoundaryMode h_boundary = HBoundaryMode::replicate;

  std::optional<InflowSpec> inflow;
  std::optional<OutflowSpec> outflow;

  double snapshot_interval = 0.0;  // <= 0: no periodic snapshots
  std::string output_dir;          // empty: keep results in memory only
  double extent_threshold = 0.05;  // m of depth counted as flooded

  // Initial water state; the default is a dry domain.
  double initial_depth = 0.0;            // uniform depth everywhere
  std::optional<double> initial_surface; // free-surface level: h = max(0, s - z)
};

// Low-level parse: dotted keys to raw string values.
std::map<std::string, std::string> parse_config_text(const std::string& text);

SimConfig load_config(const std::string& path);
SimConfig config_from_text(const std::string& text);

// Throws on invariant violations (nonpositive dt/duration, bad fractions...).
void validate_config(const SimConfig& cfg);

}  // namespace floodsim
