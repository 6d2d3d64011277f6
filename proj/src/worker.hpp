#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "boundary.hpp"
#include "channel.hpp"
#include "raster.hpp"
#include "swe.hpp"
#include "topology.hpp"

namespace floodsim {

// Inflow/outflow sections resolved to global cell indices along their side,
// with the static per-cell data every worker needs for the level solve.
struct ResolvedInflow {
  Side side = Side::west;
  IndexRange range;                // global indices along the side
  std::vector<SectionCell> cells;  // one per index in range, ascending
  StepSeries discharge;
  double slope = 0.0;
};

struct ResolvedOutflow {
  Side side = Side::east;
  IndexRange range;
  double slope = 0.0;
};

struct StepPlan {
  double start_time = 0.0;
  double dt = 0.1;
  int64_t n_steps = 0;
  double last_dt = 0.0;  // 0 means the final step is a full dt

  double dt_at(int64_t k) const {
    return (last_dt > 0.0 && k == n_steps - 1) ? last_dt : dt;
  }
  // Only the final step may be truncated, so start times are exact multiples.
  double time_at(int64_t k) const { return start_time + static_cast<double>(k) * dt; }
};

// Builds the plan for a duration: full dt steps plus one truncated step when
// dt does not divide the duration, so simulated time lands exactly on it.
StepPlan plan_steps(double start_time, double duration, double dt);

struct LedgerTotals {
  double inflow = 0.0;   // cumulative boundary inflow volume, m^3
  double outflow = 0.0;  // cumulative boundary outflow volume, m^3
  double clamped = 0.0;  // cumulative volume removed by the depth clamp, m^3
};

struct TimingTotals {
  int64_t compute_ns = 0;
  int64_t exchange_ns = 0;
  int64_t steps = 0;
};

enum class HBoundaryMode { replicate, reflect_wall };

struct PoolConfig {
  double g = 9.80665;
  double h_min = 1e-3;
  HBoundaryMode h_boundary = HBoundaryMode::replicate;
  std::optional<ResolvedInflow> inflow;
  std::optional<ResolvedOutflow> outflow;
};

// One worker per subgrid, communicating only through halo packets. A run is
// a pure function of (DEM, Manning field, initial state, plan): results are
// bitwise identical across repeated runs and across partition layouts.
class WorkerPool {
 public:
  // All rasters are padded global grids matching topo's dims.
  WorkerPool(const Raster& z, const Raster& manning, const Raster& h0, const Topology& topo,
             const PoolConfig& cfg);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // Runs steps [first, first+count) of the plan on all workers in parallel;
  // rethrows the first worker failure.
  void run_steps(const StepPlan& plan, int64_t first, int64_t count);

  // One halo-exchange phase for `field` at the current step, no dynamics.
  void exchange_only(FieldTag field);

  int worker_count() const { return static_cast<int>(workers_.size()); }
  const Topology& topology() const { return topo_; }
  int64_t current_step() const { return step_; }

  // Padded global gathers. qx has cols+1 columns, qy has rows+1 rows.
  Raster gather_h() const;
  Raster gather_qx() const;
  Raster gather_qy() const;

  // Sum of h * dx^2 over the padded grid, accumulated per worker in row-major
  // order and combined in worker order (deterministic for a fixed layout).
  double total_volume() const;

  LedgerTotals ledger() const;
  TimingTotals timings() const;
  void reset_timings();

  // Test hook: the channel delivering packets from `from` into `to`'s ghost
  // strips, or nullptr if they are not neighbors.
  Channel* channel_between(int from, int to);

  // Test hook: direct access to a worker's tile state.
  TileState& tile(int worker);

 private:
  struct Slot;
  void worker_body(Slot& w, const StepPlan& plan, int64_t first, int64_t count);
  void exchange_field(Slot& w, FieldTag f, int64_t step);
  void apply_boundary(Slot& w, double t, double dt, const PhysicsParams& p);
  void run_parallel(const std::function<void(Slot&)>& fn);

  Topology topo_;
  PoolConfig cfg_;
  double dx_ = 1.0;
  std::vector<std::unique_ptr<Slot>> workers_;
  std::atomic<bool> abort_{false};
  std::vector<std::unique_ptr<Channel>> channels_;
  int64_t step_ = 0;  // next step index to execute
};

}  // namespace floodsim
