#include "driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace floodsim {

namespace {

std::string format_sim_seconds(double t) {
  const long long ll = std::llround(t);
  if (std::abs(t - static_cast<double>(ll)) < 1e-6) return std::to_string(ll);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

ResolvedInflow resolve_inflow(const InflowSpec& spec, const Raster& z_padded,
                              const Raster& n_padded, const PadRecord& pad) {
  ResolvedInflow r;
  r.side = spec.section.side;
  const bool row_indexed = (r.side == Side::west || r.side == Side::east);
  // Fractions resolve against the unpadded extent so padding never moves
  // the section.
  r.range = resolve_section(spec.section, row_indexed ? pad.orig_rows : pad.orig_cols);
  r.discharge = spec.discharge;
  r.slope = spec.slope;
  for (int64_t g = r.range.begin; g < r.range.end; ++g) {
    int64_t row = 0, col = 0;
    switch (r.side) {
      case Side::west: row = g; col = 0; break;
      case Side::east: row = g; col = z_padded.cols - 1; break;
      case Side::north: row = 0; col = g; break;
      case Side::south: row = z_padded.rows - 1; col = g; break;
    }
    r.cells.push_back(SectionCell{z_padded.at(row, col), n_padded.at(row, col)});
  }
  return r;
}

ResolvedOutflow resolve_outflow(const OutflowSpec& spec, const PadRecord& pad) {
  ResolvedOutflow r;
  r.side = spec.section.side;
  const bool row_indexed = (r.side == Side::west || r.side == Side::east);
  r.range = resolve_section(spec.section, row_indexed ? pad.orig_rows : pad.orig_cols);
  r.slope = spec.slope;
  return r;
}

// Steps at which periodic snapshots land, rounded down to the nearest step.
std::vector<int64_t> snapshot_steps(const StepPlan& plan, double interval, double duration) {
  std::vector<int64_t> steps;
  if (interval <= 0.0) return steps;
  const int64_t count = static_cast<int64_t>(std::floor(duration / interval + 1e-9));
  for (int64_t s = 1; s <= count; ++s) {
    int64_t k = static_cast<int64_t>(std::floor(static_cast<double>(s) * interval / plan.dt + 1e-9));
    k = std::min(k, plan.n_steps);
    if (k >= 1 && (steps.empty() || steps.back() != k)) steps.push_back(k);
  }
  return steps;
}

}  // namespace

SimulationSetup prepare_simulation(const SimConfig& cfg, const Raster& dem) {
  validate_config(cfg);

  Raster working = dem;
  validate_dem(working);

  int64_t factor = cfg.downsample;
  if (cfg.resolution > 0.0) {
    const double ratio = cfg.resolution / working.cell_size;
    const int64_t f = static_cast<int64_t>(std::llround(ratio));
    if (f < 1 || std::abs(ratio - static_cast<double>(f)) > 1e-9)
      throw std::runtime_error("config: resolution must be an integer multiple of the DEM cell size");
    factor = f;
  }
  if (factor > 1) working = downsample_mean(working, factor);

  SimulationSetup s;
  s.cfg = cfg;

  Raster n_field;
  if (!cfg.manning_path.empty()) {
    n_field = load_raster(cfg.manning_path, cfg.manning_format);
    if (n_field.rows != working.rows || n_field.cols != working.cols)
      throw std::runtime_error("Manning raster dims must match the working DEM");
  } else {
    n_field = make_raster(working.rows, working.cols, working.cell_size,
                          static_cast<float>(cfg.manning));
  }

  auto [z_padded, pad] = pad_to_divisible(working, cfg.cx, cfg.cy);
  s.z_padded = std::move(z_padded);
  s.pad = pad;
  s.n_padded = pad_to_divisible(n_field, cfg.cx, cfg.cy).first;

  s.h0_padded = make_raster(s.z_padded.rows, s.z_padded.cols, s.z_padded.cell_size);
  if (cfg.initial_surface) {
    // Computed in float so a representable constant free surface stays
    // exactly constant in the solver's arithmetic.
    const float surface = static_cast<float>(*cfg.initial_surface);
    for (int64_t i = 0; i < s.h0_padded.rows; ++i)
      for (int64_t j = 0; j < s.h0_padded.cols; ++j) {
        const float h = surface - s.z_padded.at(i, j);
        s.h0_padded.at(i, j) = h > 0.0f ? h : 0.0f;
      }
  } else if (cfg.initial_depth > 0.0) {
    std::fill(s.h0_padded.values.begin(), s.h0_padded.values.end(),
              static_cast<float>(cfg.initial_depth));
  }

  s.topo = build_topology(s.z_padded.rows, s.z_padded.cols, cfg.cx, cfg.cy);
  s.plan = plan_steps(cfg.start_time, cfg.duration, cfg.dt);

  PoolConfig pool_cfg;
  pool_cfg.g = cfg.g;
  pool_cfg.h_min = cfg.h_min;
  pool_cfg.h_boundary = cfg.h_boundary;
  if (cfg.inflow) pool_cfg.inflow = resolve_inflow(*cfg.inflow, s.z_padded, s.n_padded, s.pad);
  if (cfg.outflow) pool_cfg.outflow = resolve_outflow(*cfg.outflow, s.pad);
  s.pool = std::make_unique<WorkerPool>(s.z_padded, s.n_padded, s.h0_padded, s.topo, pool_cfg);
  return s;
}

SimulationSetup prepare_simulation(const SimConfig& cfg) {
  if (cfg.dem_path.empty()) throw std::runtime_error("config: dem_path is required");
  return prepare_simulation(cfg, load_raster(cfg.dem_path, cfg.dem_format));
}

Raster extent_mask(const Raster& h, double threshold) {
  if (threshold < 0.0) throw std::runtime_error("extent threshold must be >= 0");
  Raster mask = make_raster(h.rows, h.cols, h.cell_size);
  mask.origin_x = h.origin_x;
  mask.origin_y = h.origin_y;
  const float thr = static_cast<float>(threshold);
  for (size_t i = 0; i < h.values.size(); ++i)
    mask.values[i] = h.values[i] > thr ? 1.0f : 0.0f;
  return mask;
}

std::vector<double> steady_state_metric(const std::vector<Raster>& snapshots) {
  if (snapshots.size() < 2)
    throw std::runtime_error("steady-state check needs at least two snapshots");
  std::vector<double> metric;
  for (size_t s = 1; s < snapshots.size(); ++s) {
    const Raster& a = snapshots[s - 1];
    const Raster& b = snapshots[s];
    if (a.rows != b.rows || a.cols != b.cols)
      throw std::runtime_error("snapshot dims differ");
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
      m = std::max(m, std::abs(static_cast<double>(b.values[i]) - a.values[i]));
    metric.push_back(m);
  }
  return metric;
}

RunReport run_simulation(SimulationSetup& s) {
  const SimConfig& cfg = s.cfg;
  WorkerPool& pool = *s.pool;
  const double dx = s.z_padded.cell_size;

  const bool write_files = !cfg.output_dir.empty();
  if (write_files) std::filesystem::create_directories(cfg.output_dir);

  RunReport report;
  report.pad = s.pad;
  report.topo = s.topo;

  const double v0 = pool.total_volume();
  std::vector<Raster> snapshot_grids;

  auto record_snapshot = [&](int64_t step, double time) {
    const LedgerTotals led = pool.ledger();
    LedgerRow row;
    row.step = step;
    row.time = time;
    row.volume = pool.total_volume();
    row.inflow = led.inflow;
    row.outflow = led.outflow;
    row.clamped = led.clamped;
    const double expected = row.inflow - row.outflow - row.clamped;
    const double scale =
        std::max({std::abs(row.volume), std::abs(v0), row.inflow, row.outflow, 1e-12});
    row.residual_rel = ((row.volume - v0) - expected) / scale;
    report.ledger.push_back(row);

    Raster h = crop_to_record(pool.gather_h(), s.pad);
    if (write_files) {
      const std::string tag = format_sim_seconds(time);
      const std::string h_path = cfg.output_dir + "/h_" + tag + ".r32";
      const std::string e_path = cfg.output_dir + "/extent_" + tag + ".asc";
      write_raster(h, h_path, RasterFormat::raw_f32);
      write_raster(extent_mask(h, cfg.extent_threshold), e_path, RasterFormat::ascii_grid);
      report.snapshot_paths.push_back(h_path);
    }
    snapshot_grids.push_back(std::move(h));
  };

  const auto wall0 = std::chrono::steady_clock::now();
  record_snapshot(0, cfg.start_time);

  int64_t done = 0;
  for (int64_t mark : snapshot_steps(s.plan, cfg.snapshot_interval, cfg.duration)) {
    if (mark > done) {
      pool.run_steps(s.plan, done, mark - done);
      done = mark;
    }
    record_snapshot(done, s.plan.time_at(done - 1) + s.plan.dt_at(done - 1));
  }
  if (done < s.plan.n_steps) {
    pool.run_steps(s.plan, done, s.plan.n_steps - done);
    done = s.plan.n_steps;
  }
  const auto wall1 = std::chrono::steady_clock::now();

  report.steps_executed = done;
  report.simulated_seconds =
      done > 0 ? (s.plan.time_at(done - 1) + s.plan.dt_at(done - 1)) - cfg.start_time : 0.0;
  report.wall_seconds = std::chrono::duration<double>(wall1 - wall0).count();
  report.timings = pool.timings();

  report.final_h = crop_to_record(pool.gather_h(), s.pad);
  report.final_extent = extent_mask(report.final_h, cfg.extent_threshold);
  report.snapshots_recorded = static_cast<int64_t>(snapshot_grids.size());
  if (snapshot_grids.size() >= 2) report.steady_metric = steady_state_metric(snapshot_grids);

  // Final ledger row if the last snapshot did not land on the final step.
  if (report.ledger.empty() || report.ledger.back().step != done) {
    const LedgerTotals led = pool.ledger();
    LedgerRow row;
    row.step = done;
    row.time = cfg.start_time + report.simulated_seconds;
    row.volume = pool.total_volume();
    row.inflow = led.inflow;
    row.outflow = led.outflow;
    row.clamped = led.clamped;
    const double expected = row.inflow - row.outflow - row.clamped;
    const double scale =
        std::max({std::abs(row.volume), std::abs(v0), row.inflow, row.outflow, 1e-12});
    row.residual_rel = ((row.volume - v0) - expected) / scale;
    report.ledger.push_back(row);
  }

  if (write_files) write_run_report(report, cfg);
  return report;
}

RunReport run_simulation(const SimConfig& cfg, const Raster& dem) {
  SimulationSetup s = prepare_simulation(cfg, dem);
  return run_simulation(s);
}

RunReport run_simulation(const SimConfig& cfg) {
  SimulationSetup s = prepare_simulation(cfg);
  return run_simulation(s);
}

void write_run_report(const RunReport& report, const SimConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir + "/ledger.csv");
    out << "step,time_s,volume_m3,inflow_m3,outflow_m3,clamped_m3,residual_rel\n";
    char buf[256];
    for (const auto& row : report.ledger) {
      std::snprintf(buf, sizeof buf, "%lld,%.6f,%.17g,%.17g,%.17g,%.17g,%.3e\n",
                    static_cast<long long>(row.step), row.time, row.volume, row.inflow,
                    row.outflow, row.clamped, row.residual_rel);
      out << buf;
    }
  }
  std::ofstream out(cfg.output_dir + "/report.txt");
  out << "steps_executed " << report.steps_executed << "\n";
  out << "simulated_seconds " << report.simulated_seconds << "\n";
  out << "wall_seconds " << report.wall_seconds << "\n";
  out << "grid_rows " << report.pad.orig_rows << "\n";
  out << "grid_cols " << report.pad.orig_cols << "\n";
  out << "padded_rows " << report.topo.rows << "\n";
  out << "padded_cols " << report.topo.cols << "\n";
  out << "workers " << report.topo.worker_count() << " (cx " << report.topo.cx << ", cy "
      << report.topo.cy << ")\n";
  const double total_ns =
      static_cast<double>(report.timings.compute_ns + report.timings.exchange_ns);
  out << "exchange_pct "
      << (total_ns > 0.0 ? 100.0 * static_cast<double>(report.timings.exchange_ns) / total_ns
                         : 0.0)
      << "\n";
  if (!report.ledger.empty()) {
    const auto& last = report.ledger.back();
    out << "final_volume_m3 " << last.volume << "\n";
    out << "cum_inflow_m3 " << last.inflow << "\n";
    out << "cum_outflow_m3 " << last.outflow << "\n";
    out << "cum_clamped_m3 " << last.clamped << "\n";
    out << "mass_residual_rel " << last.residual_rel << "\n";
  }
  out << "snapshots " << report.snapshots_recorded << "\n";
  for (const auto& p : report.snapshot_paths) out << "snapshot " << p << "\n";
  if (!report.steady_metric.empty())
    out << "steady_metric_last " << report.steady_metric.back() << "\n";
}

}  // namespace floodsim
