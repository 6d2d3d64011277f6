#include "boundary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace floodsim {

Side side_from_string(const std::string& s) {
  if (s == "north") return Side::north;
  if (s == "south") return Side::south;
  if (s == "east") return Side::east;
  if (s == "west") return Side::west;
  throw std::runtime_error("unknown side '" + s + "' (expected north|south|east|west)");
}

const char* to_string(Side s) {
  switch (s) {
    case Side::north: return "north";
    case Side::south: return "south";
    case Side::east: return "east";
    default: return "west";
  }
}

void StepSeries::add(double t, double value) {
  if (!times_.empty() && t <= times_.back())
    throw std::runtime_error("series breakpoints must be strictly increasing");
  times_.push_back(t);
  values_.push_back(value);
}

double StepSeries::value_at(double t) const {
  if (times_.empty()) throw std::runtime_error("empty series");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return values_.front();  // before the first breakpoint
  return values_[static_cast<size_t>(it - times_.begin()) - 1];
}

IndexRange resolve_section(const CrossSection& s, int64_t side_len) {
  if (!(s.fraction_start >= 0.0 && s.fraction_start < s.fraction_end && s.fraction_end <= 1.0))
    throw std::runtime_error("cross section requires 0 <= fraction_start < fraction_end <= 1");
  if (side_len < 1) throw std::runtime_error("cross section side has no cells");
  IndexRange r;
  r.begin = std::clamp<int64_t>(static_cast<int64_t>(s.fraction_start * static_cast<double>(side_len)),
                                0, side_len - 1);
  r.end = std::clamp<int64_t>(
      static_cast<int64_t>(std::ceil(s.fraction_end * static_cast<double>(side_len))), r.begin + 1,
      side_len);
  return r;
}

double manning_flux(double h, double slope, double n, double dx) {
  if (h <= 0.0) return 0.0;
  return dx / n * std::pow(h, 5.0 / 3.0) * std::sqrt(slope);
}

InflowSolution solve_inflow_level(const std::vector<SectionCell>& cells, double q_in,
                                  double slope, double dx) {
  if (cells.empty()) throw std::runtime_error("inflow section is empty");
  if (q_in < 0.0) throw std::runtime_error("inflow discharge must be >= 0");
  if (!(slope > 0.0)) throw std::runtime_error("inflow slope must be > 0");

  double z_min = cells.front().z;
  for (const auto& c : cells) z_min = std::min<double>(z_min, c.z);

  InflowSolution sol;
  sol.q_cell.assign(cells.size(), 0.0);
  if (q_in == 0.0) {
    sol.level = z_min;
    return sol;
  }

  auto total = [&](double level) {
    double sum = 0.0;
    for (const auto& c : cells)
      sum += manning_flux(std::max(level - static_cast<double>(c.z), 0.0), slope,
                          static_cast<double>(c.n), dx);
    return sum;
  };

  // Bracket [lo, hi] with total(lo) <= q_in <= total(hi).
  double lo = z_min;
  double depth = 1.0;
  while (total(z_min + depth) < q_in) {
    lo = z_min + depth;
    depth *= 2.0;
    if (depth > 1e6)
      throw std::runtime_error("inflow level solve failed to bracket within 1e6 m of depth");
  }
  double hi = z_min + depth;

  const double tol = 1e-6 * q_in;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double q = total(mid);
    if (std::abs(q - q_in) <= tol) break;
    if (q < q_in)
      lo = mid;
    else
      hi = mid;
  }

  sol.level = mid;
  for (size_t i = 0; i < cells.size(); ++i)
    sol.q_cell[i] = manning_flux(std::max(mid - static_cast<double>(cells[i].z), 0.0), slope,
                                 static_cast<double>(cells[i].n), dx);
  return sol;
}

}  // namespace floodsim
