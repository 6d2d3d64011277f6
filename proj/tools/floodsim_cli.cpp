// Command-line front end for the floodsim shared library. Talks to the
// engine exclusively through the public C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "floodsim/floodsim.h"

namespace {

int report_failure(const char* what, fsim_status rc) {
  std::fprintf(stderr, "floodsim: %s failed (%d): %s\n", what, static_cast<int>(rc),
               fsim_last_error());
  return 1;
}

int cmd_simulate(const std::string& config_path, bool quiet) {
  fsim_config* cfg = nullptr;
  fsim_status rc = fsim_config_load(config_path.c_str(), &cfg);
  if (rc != FSIM_OK) return report_failure("loading config", rc);

  fsim_result* result = nullptr;
  rc = fsim_simulate(cfg, &result);
  fsim_config_free(cfg);
  if (rc != FSIM_OK) return report_failure("simulate", rc);

  if (!quiet) {
    char* summary = nullptr;
    if (fsim_result_summary(result, &summary) == FSIM_OK) {
      std::fputs(summary, stdout);
      fsim_string_free(summary);
    }
  }
  fsim_result_free(result);
  return 0;
}

int cmd_bench(const std::vector<int>& resolutions, const std::vector<int>& workers,
              int64_t steps, int64_t warmup, int64_t base_rows, int64_t base_cols,
              bool strip_only, const std::string& dem, const std::string& dem_format,
              const std::string& out_csv) {
  std::vector<int32_t> res32(resolutions.begin(), resolutions.end());
  std::vector<int32_t> wrk32(workers.begin(), workers.end());
  fsim_bench_options opt{};
  opt.resolutions = res32.data();
  opt.n_resolutions = res32.size();
  opt.worker_counts = wrk32.data();
  opt.n_worker_counts = wrk32.size();
  opt.steps = steps;
  opt.warmup = warmup;
  opt.base_rows = base_rows;
  opt.base_cols = base_cols;
  opt.all_layouts = strip_only ? 0 : 1;
  opt.dem_path = dem.empty() ? nullptr : dem.c_str();
  opt.dem_format = dem_format.empty() ? nullptr : dem_format.c_str();

  const fsim_status rc = fsim_bench(&opt, out_csv.c_str());
  if (rc != FSIM_OK) return report_failure("bench", rc);
  std::printf("wrote %s\n", out_csv.c_str());
  return 0;
}

int cmd_layouts(int workers) {
  char* text = nullptr;
  const fsim_status rc = fsim_layouts_text(workers, &text);
  if (rc != FSIM_OK) return report_failure("layouts", rc);
  std::fputs(text, stdout);
  fsim_string_free(text);
  return 0;
}

int cmd_report(const std::string& csv, bool curve) {
  char* text = nullptr;
  const fsim_status rc = curve ? fsim_scaling_curve_from_csv(csv.c_str(), &text)
                               : fsim_report_from_csv(csv.c_str(), &text);
  if (rc != FSIM_OK) return report_failure("report", rc);
  std::fputs(text, stdout);
  fsim_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("floodsim riverine flood simulator (") + fsim_version() + ")"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* simulate = app.add_subcommand("simulate", "run a simulation from a config file");
  simulate->add_option("--config", config_path, "run configuration file")->required();
  simulate->add_flag("--quiet", quiet, "suppress the summary printout");

  std::vector<int> resolutions{8};
  std::vector<int> workers{1, 2, 4, 8};
  int64_t steps = 1000, warmup = 50, base_rows = 1024, base_cols = 1024;
  bool strip_only = false;
  std::string dem, dem_format = "raw_f32", out_csv = "bench.csv";
  auto* bench = app.add_subcommand("bench", "run the scaling benchmark matrix");
  bench->add_option("--resolutions", resolutions, "cell sizes in meters")->delimiter(',');
  bench->add_option("--workers", workers, "worker counts to sweep")->delimiter(',');
  bench->add_option("--steps", steps, "timed steps per configuration");
  bench->add_option("--warmup", warmup, "untimed warm-up steps");
  bench->add_option("--base-rows", base_rows, "synthetic terrain rows at 1 m");
  bench->add_option("--base-cols", base_cols, "synthetic terrain cols at 1 m");
  bench->add_flag("--strip-only", strip_only, "bench only 1xN and Nx1 layouts");
  bench->add_option("--dem", dem, "bench on this DEM instead of synthetic terrain");
  bench->add_option("--dem-format", dem_format, "ascii_grid or raw_f32");
  bench->add_option("--out", out_csv, "output CSV path");

  int layout_workers = 8;
  auto* layouts = app.add_subcommand("layouts", "list partition layouts for a worker count");
  layouts->add_option("--workers", layout_workers, "worker count")->required();

  std::string report_csv;
  bool curve = false;
  auto* report = app.add_subcommand("report", "weak/strong scaling tables from a bench CSV");
  report->add_option("--csv", report_csv, "benchmark CSV")->required();
  report->add_flag("--curve", curve, "emit the points-per-worker collapse curve instead");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return cmd_simulate(config_path, quiet);
  if (bench->parsed())
    return cmd_bench(resolutions, workers, steps, warmup, base_rows, base_cols, strip_only, dem,
                     dem_format, out_csv);
  if (layouts->parsed()) return cmd_layouts(layout_workers);
  if (report->parsed()) return cmd_report(report_csv, curve);
  return 1;
}
