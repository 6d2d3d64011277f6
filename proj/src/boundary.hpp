#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace floodsim {

enum class Side { north, south, east, west };

Side side_from_string(const std::string& s);
const char* to_string(Side s);

// Piecewise-constant time series with left-closed intervals: value_at(t)
// returns the value of the latest breakpoint with time <= t.
class StepSeries {
 public:
  StepSeries() = default;
  explicit StepSeries(double constant) { add(0.0, constant); }
  void add(double t, double value);
  double value_at(double t) const;
  bool empty() const { return times_.empty(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

// A span along one grid side, given as fractions of that side's length.
// Fractions resolve against the unpadded grid extent, so partition padding
// never shifts the section.
struct CrossSection {
  Side side = Side::west;
  double fraction_start = 0.0;
  double fraction_end = 1.0;
};

struct IndexRange {
  int64_t begin = 0;  // inclusive
  int64_t end = 0;    // exclusive
};

// Resolves fractions to cell indices along the side (row indices for
// east/west, column indices for north/south). The range is never empty.
IndexRange resolve_section(const CrossSection& s, int64_t side_len);

struct InflowSpec {
  CrossSection section;
  StepSeries discharge;  // Q_in(t), m^3/s, all values >= 0
  double slope = 0.0;    // S_in > 0
};

struct OutflowSpec {
  CrossSection section;
  double slope = 0.0;  // S_out > 0
};

// Manning discharge through one cell of width dx with hydraulic radius
// approximated by the depth: Q = (dx/n) * h^(5/3) * sqrt(slope).
double manning_flux(double h, double slope, double n, double dx);

// Static per-cell data of a cross section, in ascending index order along
// the side. Every worker touching the section carries the full list so the
// water-level solve is identical everywhere.
struct SectionCell {
  float z = 0.0f;
  float n = 0.0f;
};

struct InflowSolution {
  double level = 0.0;            // W
  std::vector<double> q_cell;    // m^3/s per section cell, sums to Q_in
};

// Finds the water level W with sum_c manning_flux(max(W - z_c, 0)) = q_in by
// bisection (the objective is nondecreasing in W). Relative tolerance 1e-6
// on the discharge, bracket grown by doubling from 1 m above min z.
InflowSolution solve_inflow_level(const std::vector<SectionCell>& cells, double q_in,
                                  double slope, double dx);

}  // namespace floodsim
