#include "floodsim/floodsim.h"

#include <cstring>
#include <exception>
#include <string>

#include "bench.hpp"
#include "config.hpp"
#include "driver.hpp"
#include "raster.hpp"
#include "topology.hpp"

namespace {

thread_local std::string g_last_error = "no error";

fsim_status fail(fsim_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
fsim_status guarded(Fn&& fn) {
  try {
    fn();
    return FSIM_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    // Parse and I/O problems surface as runtime_errors with prefixed
    // messages; classify on the text so callers can branch coarsely.
    const std::string msg = e.what();
    if (msg.find("cannot open") != std::string::npos ||
        msg.find("write failed") != std::string::npos)
      return FSIM_ERR_IO;
    if (msg.find("config:") != std::string::npos || msg.find("expected") != std::string::npos)
      return FSIM_ERR_PARSE;
    return FSIM_ERR_RUNTIME;
  } catch (...) {
    g_last_error = "unknown error";
    return FSIM_ERR_RUNTIME;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct fsim_raster {
  floodsim::Raster r;
};

struct fsim_config {
  floodsim::SimConfig cfg;
};

struct fsim_result {
  floodsim::RunReport report;
};

extern "C" {

const char* fsim_version(void) { return "floodsim 1.0.0"; }

const char* fsim_last_error(void) { return g_last_error.c_str(); }

void fsim_string_free(char* s) { delete[] s; }

fsim_status fsim_raster_load(const char* path, const char* format, fsim_raster** out) {
  if (!path || !format || !out)
    return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_raster_load: null argument");
  return guarded([&] {
    auto* r = new fsim_raster{
        floodsim::load_raster(path, floodsim::raster_format_from_string(format))};
    *out = r;
  });
}

fsim_status fsim_raster_write(const fsim_raster* r, const char* path, const char* format) {
  if (!r || !path || !format)
    return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_raster_write: null argument");
  return guarded(
      [&] { floodsim::write_raster(r->r, path, floodsim::raster_format_from_string(format)); });
}

fsim_status fsim_raster_downsample(const fsim_raster* r, int64_t factor, fsim_raster** out) {
  if (!r || !out) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_raster_downsample: null argument");
  return guarded([&] { *out = new fsim_raster{floodsim::downsample_mean(r->r, factor)}; });
}

void fsim_raster_free(fsim_raster* r) { delete r; }

int64_t fsim_raster_rows(const fsim_raster* r) { return r ? r->r.rows : 0; }
int64_t fsim_raster_cols(const fsim_raster* r) { return r ? r->r.cols : 0; }
double fsim_raster_cell_size(const fsim_raster* r) { return r ? r->r.cell_size : 0.0; }
const float* fsim_raster_values(const fsim_raster* r) {
  return r ? r->r.values.data() : nullptr;
}

fsim_status fsim_config_load(const char* path, fsim_config** out) {
  if (!path || !out) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_config_load: null argument");
  return guarded([&] {
    auto cfg = floodsim::load_config(path);
    floodsim::validate_config(cfg);
    *out = new fsim_config{std::move(cfg)};
  });
}

fsim_status fsim_config_parse(const char* text, fsim_config** out) {
  if (!text || !out) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_config_parse: null argument");
  return guarded([&] {
    auto cfg = floodsim::config_from_text(text);
    floodsim::validate_config(cfg);
    *out = new fsim_config{std::move(cfg)};
  });
}

void fsim_config_free(fsim_config* c) { delete c; }

fsim_status fsim_simulate(const fsim_config* cfg, fsim_result** out) {
  if (!cfg || !out) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_simulate: null argument");
  return guarded([&] { *out = new fsim_result{floodsim::run_simulation(cfg->cfg)}; });
}

void fsim_result_free(fsim_result* r) { delete r; }

int64_t fsim_result_steps(const fsim_result* r) { return r ? r->report.steps_executed : 0; }

double fsim_result_volume(const fsim_result* r) {
  return r && !r->report.ledger.empty() ? r->report.ledger.back().volume : 0.0;
}

double fsim_result_mass_residual(const fsim_result* r) {
  return r && !r->report.ledger.empty() ? r->report.ledger.back().residual_rel : 0.0;
}

fsim_status fsim_result_summary(const fsim_result* r, char** out_text) {
  if (!r || !out_text)
    return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_result_summary: null argument");
  return guarded([&] {
    const auto& rep = r->report;
    std::string s;
    s += "steps_executed " + std::to_string(rep.steps_executed) + "\n";
    s += "simulated_seconds " + std::to_string(rep.simulated_seconds) + "\n";
    s += "snapshots " + std::to_string(rep.snapshots_recorded) + "\n";
    s += "wall_seconds " + std::to_string(rep.wall_seconds) + "\n";
    if (!rep.ledger.empty()) {
      const auto& last = rep.ledger.back();
      s += "final_volume_m3 " + std::to_string(last.volume) + "\n";
      s += "cum_inflow_m3 " + std::to_string(last.inflow) + "\n";
      s += "cum_outflow_m3 " + std::to_string(last.outflow) + "\n";
      s += "cum_clamped_m3 " + std::to_string(last.clamped) + "\n";
      s += "mass_residual_rel " + std::to_string(last.residual_rel) + "\n";
    }
    *out_text = copy_string(s);
  });
}

fsim_status fsim_bench(const fsim_bench_options* opt, const char* csv_path) {
  if (!opt || !csv_path) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_bench: null argument");
  return guarded([&] {
    floodsim::BenchOptions o;
    if (opt->resolutions && opt->n_resolutions > 0)
      o.resolutions.assign(opt->resolutions, opt->resolutions + opt->n_resolutions);
    if (opt->worker_counts && opt->n_worker_counts > 0)
      o.worker_counts.assign(opt->worker_counts, opt->worker_counts + opt->n_worker_counts);
    if (opt->steps > 0) o.steps = opt->steps;
    o.warmup = opt->warmup > 0 ? opt->warmup : 50;
    if (opt->base_rows > 0) o.base_rows = opt->base_rows;
    if (opt->base_cols > 0) o.base_cols = opt->base_cols;
    o.all_layouts = opt->all_layouts != 0;
    if (opt->dem_path) o.dem_path = opt->dem_path;
    if (opt->dem_format) o.dem_format = opt->dem_format;
    floodsim::write_bench_csv(floodsim::run_bench(o), csv_path);
  });
}

fsim_status fsim_layouts_text(int32_t n_workers, char** out_text) {
  if (!out_text) return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_layouts_text: null argument");
  return guarded([&] {
    std::string s = "cx,cy,internal_edges\n";
    for (const auto& l : floodsim::enumerate_layouts(n_workers))
      s += std::to_string(l.cx) + "," + std::to_string(l.cy) + "," +
           std::to_string(l.internal_edges) + "\n";
    *out_text = copy_string(s);
  });
}

fsim_status fsim_report_from_csv(const char* csv_path, char** out_text) {
  if (!csv_path || !out_text)
    return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_report_from_csv: null argument");
  return guarded([&] {
    *out_text = copy_string(floodsim::efficiency_report(floodsim::read_bench_csv(csv_path)));
  });
}

fsim_status fsim_scaling_curve_from_csv(const char* csv_path, char** out_text) {
  if (!csv_path || !out_text)
    return fail(FSIM_ERR_INVALID_ARGUMENT, "fsim_scaling_curve_from_csv: null argument");
  return guarded([&] {
    *out_text = copy_string(floodsim::scaling_curve_csv(floodsim::read_bench_csv(csv_path)));
  });
}

}  // extern "C"
