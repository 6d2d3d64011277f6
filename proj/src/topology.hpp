#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "boundary.hpp"  // Side

namespace floodsim {

// One worker's share of the padded global grid, in global cell coordinates.
struct TileExtent {
  int worker = 0;
  int tile_x = 0;  // column of the tile in the worker grid
  int tile_y = 0;  // row of the tile in the worker grid
  int64_t row0 = 0, rows = 0;
  int64_t col0 = 0, cols = 0;
  std::optional<int> neighbor[4];  // indexed by Side
  bool global_edge[4] = {true, true, true, true};
};

// Equal-tile cx-by-cy partition of a padded grid with row-major worker ids.
struct Topology {
  int cx = 1, cy = 1;
  int64_t rows = 0, cols = 0;  // padded global dims
  std::vector<TileExtent> tiles;

  int worker_count() const { return cx * cy; }
  const TileExtent& tile(int worker) const { return tiles[static_cast<size_t>(worker)]; }
};

// Requires cy | rows and cx | cols (pad_to_divisible guarantees this).
Topology build_topology(int64_t rows, int64_t cols, int cx, int cy);

struct LayoutInfo {
  int cx = 0;
  int cy = 0;
  // Number of adjacent tile pairs; each pair is one halo-exchange link per
  // field per step, so this is the communication cost proxy.
  int64_t internal_edges = 0;
};

// All factor pairs cx*cy == n_workers, ordered by ascending cx.
std::vector<LayoutInfo> enumerate_layouts(int n_workers);

inline int64_t internal_edge_count(int cx, int cy) {
  return static_cast<int64_t>(cx) * (cy - 1) + static_cast<int64_t>(cy) * (cx - 1);
}

}  // namespace floodsim
