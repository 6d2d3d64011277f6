#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "raster.hpp"

namespace floodsim {

struct BenchOptions {
  std::vector<int> resolutions{8};     // cell sizes in meters
  std::vector<int> worker_counts{1};
  int64_t steps = 1000;                // timed step budget
  int64_t warmup = 50;                 // untimed steps before the clock starts
  int64_t base_rows = 1024;            // synthetic 1 m terrain dims
  int64_t base_cols = 1024;
  bool all_layouts = true;             // false: strip layouts (1xN, Nx1) only
  std::string dem_path;                // optional real DEM instead of synthetic
  std::string dem_format = "raw_f32";
  double dt = 0.5;
  double manning = 0.03;
};

struct BenchRecord {
  double resolution_m = 0.0;
  int64_t grid_points = 0;
  int workers = 0;
  int cx = 0;
  int cy = 0;
  double steps_per_s = 0.0;
  double exchange_pct = 0.0;   // mean halo-exchange share of step time
  double t_1m_steps_s = 0.0;   // derived: 1e6 / steps_per_s
};

// Gently inclined valley with a sinusoidal cross profile, used when no DEM
// is supplied. Deterministic in its arguments.
Raster synthetic_valley(int64_t rows, int64_t cols, double cell_size);

// Runs the full (resolution x workers x layout) matrix through the regular
// simulation path with snapshots disabled. One configuration runs at a time.
std::vector<BenchRecord> run_bench(const BenchOptions& opt);

void write_bench_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> read_bench_csv(const std::string& path);
std::string bench_csv_text(const std::vector<BenchRecord>& records);

// Scaling efficiencies in percent.
double weak_efficiency(double t_base, double t_scaled);
double strong_efficiency(double t_base, double workers_base, double t_scaled,
                         double workers_scaled);

// One row of the assembled efficiency tables. Baselines carry no percentage.
struct EfficiencyEntry {
  double resolution_m = 0.0;
  int workers = 0;
  double t_1m_steps_s = 0.0;
  std::optional<double> weak_pct;
  std::optional<double> strong_pct;
};

// Uses the best (fastest) layout per (resolution, workers). Strong baselines
// are the smallest worker count per resolution; weak baselines are the
// smallest worker count holding points-per-worker equal within 2%.
std::vector<EfficiencyEntry> efficiency_table(const std::vector<BenchRecord>& records);

// Aligned text tables: time per 1M steps, weak scaling, strong scaling.
std::string efficiency_report(const std::vector<BenchRecord>& records);

struct ScalingPoint {
  double resolution_m = 0.0;
  double points_per_worker = 0.0;
  double steps_per_s = 0.0;
  bool best_layout = false;  // fastest layout for its (resolution, workers)
};

// Collapse-plot data, ordered by ascending points-per-worker.
std::vector<ScalingPoint> scaling_curve(const std::vector<BenchRecord>& records);
std::string scaling_curve_csv(const std::vector<BenchRecord>& records);

// Worst-to-best throughput ratio over layouts at fixed (resolution, workers);
// reported, never asserted.
std::optional<double> layout_spread(const std::vector<BenchRecord>& records, double resolution_m,
                                    int workers);

}  // namespace floodsim
