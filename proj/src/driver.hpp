#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "raster.hpp"
#include "topology.hpp"
#include "worker.hpp"

namespace floodsim {

// Mass bookkeeping at one snapshot. All terms are cumulative since t=0 and
// accumulate in double. `clamped` is the volume removed by the negative-depth
// clamp (negative when depths were raised to zero), so the audit identity is
//   volume - volume0 = inflow - outflow - clamped.
struct LedgerRow {
  int64_t step = 0;
  double time = 0.0;
  double volume = 0.0;
  double inflow = 0.0;
  double outflow = 0.0;
  double clamped = 0.0;
  double residual_rel = 0.0;  // audit residual, relative
};

struct RunReport {
  int64_t steps_executed = 0;
  double simulated_seconds = 0.0;
  int64_t snapshots_recorded = 0;  // includes the t=0 snapshot
  std::vector<LedgerRow> ledger;
  std::vector<std::string> snapshot_paths;
  std::vector<double> steady_metric;  // max |dh| between consecutive snapshots
  Raster final_h;                     // cropped to the unpadded extent
  Raster final_extent;
  TimingTotals timings;
  double wall_seconds = 0.0;
  PadRecord pad;
  Topology topo;
};

// Everything run_simulation assembles before stepping; exposed so the bench
// harness can drive the identical code path with its own step budgets.
struct SimulationSetup {
  SimConfig cfg;
  Raster z_padded;
  Raster n_padded;
  Raster h0_padded;
  PadRecord pad;
  Topology topo;
  StepPlan plan;
  std::unique_ptr<WorkerPool> pool;
};

// Loads the DEM from cfg.dem_path. The overload takes an in-memory DEM
// (pre-downsample) and ignores dem_path.
SimulationSetup prepare_simulation(const SimConfig& cfg);
SimulationSetup prepare_simulation(const SimConfig& cfg, const Raster& dem);

RunReport run_simulation(const SimConfig& cfg);
RunReport run_simulation(const SimConfig& cfg, const Raster& dem);
RunReport run_simulation(SimulationSetup& setup);

// Binary flooded/dry mask: 1 where h > threshold.
Raster extent_mask(const Raster& h, double threshold);

// max |h_a - h_b| between consecutive snapshots; one value per interval.
std::vector<double> steady_state_metric(const std::vector<Raster>& snapshots);

// Writes report.txt and ledger.csv under cfg.output_dir.
void write_run_report(const RunReport& report, const SimConfig& cfg);

}  // namespace floodsim
