#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "config.hpp"
#include "driver.hpp"
#include "topology.hpp"

namespace floodsim {

Raster synthetic_valley(int64_t rows, int64_t cols, double cell_size) {
  Raster z = make_raster(rows, cols, cell_size);
  const double two_pi = 6.283185307179586;
  for (int64_t i = 0; i < rows; ++i) {
    const double cross = 2.0 * (1.0 + std::sin(two_pi * static_cast<double>(i) /
                                               static_cast<double>(rows)));
    for (int64_t j = 0; j < cols; ++j) {
      const double downhill = 0.001 * static_cast<double>(cols - 1 - j) * cell_size;
      z.at(i, j) = static_cast<float>(downhill + cross);
    }
  }
  return z;
}

namespace {

SimConfig bench_config(const BenchOptions& opt, double dt, int cx, int cy, double duration) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.duration = duration;
  cfg.cx = cx;
  cfg.cy = cy;
  cfg.manning = opt.manning;
  cfg.initial_depth = 1.0;  // wet everywhere so the kernel runs loaded
  InflowSpec in;
  in.section = CrossSection{Side::west, 0.25, 0.75};
  in.discharge = StepSeries(100.0);
  in.slope = 0.001;
  cfg.inflow = in;
  OutflowSpec out;
  out.section = CrossSection{Side::east, 0.25, 0.75};
  out.slope = 0.001;
  cfg.outflow = out;
  return cfg;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchOptions& opt) {
  if (opt.steps < 1) throw std::runtime_error("bench: step budget must be >= 1");
  std::vector<BenchRecord> records;

  std::optional<Raster> base_dem;
  if (!opt.dem_path.empty())
    base_dem = load_raster(opt.dem_path, raster_format_from_string(opt.dem_format));

  for (int res : opt.resolutions) {
    if (res < 1) throw std::runtime_error("bench: resolutions must be >= 1 m");
    Raster dem;
    if (base_dem) {
      const int64_t factor =
          std::max<int64_t>(1, std::llround(res / base_dem->cell_size));
      dem = factor > 1 ? downsample_mean(*base_dem, factor) : *base_dem;
    } else {
      const Dims d = downsample_dims(opt.base_rows, opt.base_cols, res);
      dem = synthetic_valley(d.rows, d.cols, res);
    }

    for (int workers : opt.worker_counts) {
      if (workers < 1) throw std::runtime_error("bench: worker counts must be >= 1");
      for (const LayoutInfo& layout : enumerate_layouts(workers)) {
        if (!opt.all_layouts && layout.cx != 1 && layout.cy != 1) continue;
        const int64_t total = opt.warmup + opt.steps;
        SimConfig cfg = bench_config(opt, opt.dt, layout.cx, layout.cy,
                                     static_cast<double>(total) * opt.dt);
        SimulationSetup setup = prepare_simulation(cfg, dem);

        if (opt.warmup > 0) setup.pool->run_steps(setup.plan, 0, opt.warmup);
        setup.pool->reset_timings();
        const auto t0 = std::chrono::steady_clock::now();
        setup.pool->run_steps(setup.plan, opt.warmup, opt.steps);
        const auto t1 = std::chrono::steady_clock::now();

        const double wall = std::chrono::duration<double>(t1 - t0).count();
        const TimingTotals tim = setup.pool->timings();
        const double tot_ns = static_cast<double>(tim.compute_ns + tim.exchange_ns);

        BenchRecord rec;
        rec.resolution_m = res;
        rec.grid_points = setup.topo.rows * setup.topo.cols;
        rec.workers = workers;
        rec.cx = layout.cx;
        rec.cy = layout.cy;
        rec.steps_per_s = static_cast<double>(opt.steps) / wall;
        rec.exchange_pct =
            tot_ns > 0.0 ? 100.0 * static_cast<double>(tim.exchange_ns) / tot_ns : 0.0;
        rec.t_1m_steps_s = 1e6 / rec.steps_per_s;
        records.push_back(rec);
      }
    }
  }
  return records;
}

std::string bench_csv_text(const std::vector<BenchRecord>& records) {
  std::string out = "resolution_m,grid_points,workers,cx,cy,steps_per_s,exchange_pct,t_1M_steps_s\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%g,%lld,%d,%d,%d,%.9g,%.6g,%.9g\n", r.resolution_m,
                  static_cast<long long>(r.grid_points), r.workers, r.cx, r.cy, r.steps_per_s,
                  r.exchange_pct, r.t_1m_steps_s);
    out += buf;
  }
  return out;
}

void write_bench_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("bench: cannot open " + path + " for writing");
  out << bench_csv_text(records);
  if (!out) throw std::runtime_error("bench: write failed for " + path);
}

std::vector<BenchRecord> read_bench_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("bench: cannot open " + path);
  std::vector<BenchRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("bench: empty csv " + path);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8)
      throw std::runtime_error("bench: expected 8 columns on line " + std::to_string(line_no) +
                               " of " + path);
    BenchRecord r;
    r.resolution_m = std::stod(cells[0]);
    r.grid_points = std::stoll(cells[1]);
    r.workers = std::stoi(cells[2]);
    r.cx = std::stoi(cells[3]);
    r.cy = std::stoi(cells[4]);
    r.steps_per_s = std::stod(cells[5]);
    r.exchange_pct = std::stod(cells[6]);
    r.t_1m_steps_s = std::stod(cells[7]);
    records.push_back(r);
  }
  return records;
}

double weak_efficiency(double t_base, double t_scaled) {
  if (!(t_scaled > 0.0)) throw std::runtime_error("weak efficiency: scaled time must be > 0");
  return 100.0 * t_base / t_scaled;
}

double strong_efficiency(double t_base, double workers_base, double t_scaled,
                         double workers_scaled) {
  if (!(t_scaled > 0.0) || !(workers_scaled > 0.0))
    throw std::runtime_error("strong efficiency: scaled run must have positive time and workers");
  return 100.0 * (t_base * workers_base) / (t_scaled * workers_scaled);
}

std::vector<EfficiencyEntry> efficiency_table(const std::vector<BenchRecord>& records) {
  // Best (fastest) layout per (resolution, workers).
  std::map<std::pair<double, int>, BenchRecord> best;
  for (const auto& r : records) {
    auto key = std::make_pair(r.resolution_m, r.workers);
    auto it = best.find(key);
    if (it == best.end() || r.t_1m_steps_s < it->second.t_1m_steps_s) best[key] = r;
  }

  std::vector<EfficiencyEntry> out;
  for (const auto& [key, rec] : best) {
    EfficiencyEntry e;
    e.resolution_m = rec.resolution_m;
    e.workers = rec.workers;
    e.t_1m_steps_s = rec.t_1m_steps_s;

    // Strong baseline: smallest worker count at the same resolution.
    const BenchRecord* strong_base = nullptr;
    for (const auto& [k2, r2] : best)
      if (r2.resolution_m == rec.resolution_m && r2.workers < rec.workers &&
          (!strong_base || r2.workers < strong_base->workers))
        strong_base = &r2;
    if (strong_base)
      e.strong_pct = strong_efficiency(strong_base->t_1m_steps_s, strong_base->workers,
                                       rec.t_1m_steps_s, rec.workers);

    // Weak baseline: smallest worker count holding points-per-worker equal
    // (within 2%, absorbing padding differences between resolutions).
    const double ppw = static_cast<double>(rec.grid_points) / rec.workers;
    const BenchRecord* weak_base = nullptr;
    for (const auto& [k2, r2] : best) {
      if (r2.workers >= rec.workers) continue;
      const double ppw2 = static_cast<double>(r2.grid_points) / r2.workers;
      if (std::abs(ppw2 / ppw - 1.0) > 0.02) continue;
      if (!weak_base || r2.workers < weak_base->workers) weak_base = &r2;
    }
    if (weak_base) e.weak_pct = weak_efficiency(weak_base->t_1m_steps_s, rec.t_1m_steps_s);

    out.push_back(e);
  }
  return out;
}

namespace {

std::string format_duration(double seconds) {
  char buf[64];
  if (seconds < 90.0)
    std::snprintf(buf, sizeof buf, "%.3g s", seconds);
  else if (seconds < 5400.0)
    std::snprintf(buf, sizeof buf, "%.3g mins", seconds / 60.0);
  else
    std::snprintf(buf, sizeof buf, "%.3g hours", seconds / 3600.0);
  return buf;
}

std::string pad_cell(const std::string& s, size_t width) {
  return s + std::string(s.size() < width ? width - s.size() : 1, ' ');
}

std::string render_table(const std::string& title, const std::vector<double>& resolutions,
                         const std::vector<int>& workers,
                         const std::function<std::string(double, int)>& cell) {
  std::ostringstream out;
  out << title << "\n";
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head{"Resolution (m)"};
  for (int w : workers) head.push_back(std::to_string(w) + " workers");
  grid.push_back(head);
  for (double res : resolutions) {
    std::vector<std::string> row;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", res);
    row.emplace_back(buf);
    for (int w : workers) row.push_back(cell(res, w));
    grid.push_back(row);
  }
  std::vector<size_t> widths(grid[0].size(), 0);
  for (const auto& row : grid)
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  for (const auto& row : grid) {
    for (size_t c = 0; c < row.size(); ++c) out << pad_cell(row[c], widths[c] + 2);
    out << "\n";
  }
  return out.str();
}

}  // namespace

std::string efficiency_report(const std::vector<BenchRecord>& records) {
  const std::vector<EfficiencyEntry> entries = efficiency_table(records);
  if (entries.empty()) return "(no records)\n";

  std::vector<double> resolutions;
  std::vector<int> workers;
  for (const auto& e : entries) {
    if (std::find(resolutions.begin(), resolutions.end(), e.resolution_m) == resolutions.end())
      resolutions.push_back(e.resolution_m);
    if (std::find(workers.begin(), workers.end(), e.workers) == workers.end())
      workers.push_back(e.workers);
  }
  std::sort(resolutions.rbegin(), resolutions.rend());  // coarse to fine, as in the tables
  std::sort(workers.begin(), workers.end());

  auto find_entry = [&](double res, int w) -> const EfficiencyEntry* {
    for (const auto& e : entries)
      if (e.resolution_m == res && e.workers == w) return &e;
    return nullptr;
  };

  std::string out;
  out += render_table("Time to compute 1 million steps", resolutions, workers,
                      [&](double res, int w) -> std::string {
                        const EfficiencyEntry* e = find_entry(res, w);
                        return e ? format_duration(e->t_1m_steps_s) : "-";
                      });
  out += "\n";
  out += render_table("Weak scaling efficiencies", resolutions, workers,
                      [&](double res, int w) -> std::string {
                        const EfficiencyEntry* e = find_entry(res, w);
                        if (!e) return "-";
                        std::string cell = format_duration(e->t_1m_steps_s);
                        if (e->weak_pct) {
                          char buf[32];
                          std::snprintf(buf, sizeof buf, " %.0f%%", *e->weak_pct);
                          cell += buf;
                        }
                        return cell;
                      });
  out += "\n";
  out += render_table("Strong scaling efficiencies", resolutions, workers,
                      [&](double res, int w) -> std::string {
                        const EfficiencyEntry* e = find_entry(res, w);
                        if (!e) return "-";
                        std::string cell = format_duration(e->t_1m_steps_s);
                        if (e->strong_pct) {
                          char buf[32];
                          std::snprintf(buf, sizeof buf, " %.0f%%", *e->strong_pct);
                          cell += buf;
                        }
                        return cell;
                      });
  return out;
}

std::vector<ScalingPoint> scaling_curve(const std::vector<BenchRecord>& records) {
  if (records.empty()) return {};
  std::map<std::pair<double, int>, double> best;
  for (const auto& r : records) {
    auto key = std::make_pair(r.resolution_m, r.workers);
    auto it = best.find(key);
    if (it == best.end() || r.steps_per_s > it->second) best[key] = r.steps_per_s;
  }
  std::vector<ScalingPoint> pts;
  for (const auto& r : records) {
    ScalingPoint p;
    p.resolution_m = r.resolution_m;
    p.points_per_worker = static_cast<double>(r.grid_points) / r.workers;
    p.steps_per_s = r.steps_per_s;
    p.best_layout = best.at(std::make_pair(r.resolution_m, r.workers)) == r.steps_per_s;
    pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end(), [](const ScalingPoint& a, const ScalingPoint& b) {
    return a.points_per_worker < b.points_per_worker;
  });
  return pts;
}

std::string scaling_curve_csv(const std::vector<BenchRecord>& records) {
  std::string out = "points_per_worker,steps_per_s,resolution_m,best_layout\n";
  char buf[128];
  for (const auto& p : scaling_curve(records)) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%g,%d\n", p.points_per_worker, p.steps_per_s,
                  p.resolution_m, p.best_layout ? 1 : 0);
    out += buf;
  }
  return out;
}

std::optional<double> layout_spread(const std::vector<BenchRecord>& records, double resolution_m,
                                    int workers) {
  double best = 0.0, worst = 0.0;
  bool any = false;
  for (const auto& r : records) {
    if (r.resolution_m != resolution_m || r.workers != workers) continue;
    if (!any) {
      best = worst = r.steps_per_s;
      any = true;
    } else {
      best = std::max(best, r.steps_per_s);
      worst = std::min(worst, r.steps_per_s);
    }
  }
  if (!any || !(worst > 0.0)) return std::nullopt;
  return best / worst;
}

}  // namespace floodsim
