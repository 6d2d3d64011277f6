#include "topology.hpp"

#include <stdexcept>

namespace floodsim {

Topology build_topology(int64_t rows, int64_t cols, int cx, int cy) {
  if (cx < 1 || cy < 1) throw std::runtime_error("partition counts must be >= 1");
  if (rows % cy != 0 || cols % cx != 0)
    throw std::runtime_error("grid dims must divide evenly into the partition (pad first)");
  Topology topo;
  topo.cx = cx;
  topo.cy = cy;
  topo.rows = rows;
  topo.cols = cols;
  const int64_t tile_rows = rows / cy;
  const int64_t tile_cols = cols / cx;
  topo.tiles.reserve(static_cast<size_t>(cx) * cy);
  for (int ty = 0; ty < cy; ++ty) {
    for (int tx = 0; tx < cx; ++tx) {
      TileExtent t;
      t.worker = ty * cx + tx;
      t.tile_x = tx;
      t.tile_y = ty;
      t.row0 = static_cast<int64_t>(ty) * tile_rows;
      t.rows = tile_rows;
      t.col0 = static_cast<int64_t>(tx) * tile_cols;
      t.cols = tile_cols;
      auto set = [&](Side s, bool at_edge, int nbr) {
        const int k = static_cast<int>(s);
        t.global_edge[k] = at_edge;
        if (!at_edge) t.neighbor[k] = nbr;
      };
      set(Side::north, ty == 0, (ty - 1) * cx + tx);
      set(Side::south, ty == cy - 1, (ty + 1) * cx + tx);
      set(Side::west, tx == 0, ty * cx + tx - 1);
      set(Side::east, tx == cx - 1, ty * cx + tx + 1);
      topo.tiles.push_back(t);
    }
  }
  return topo;
}

std::vector<LayoutInfo> enumerate_layouts(int n_workers) {
  if (n_workers < 1) throw std::runtime_error("worker count must be >= 1");
  std::vector<LayoutInfo> out;
  for (int cx = 1; cx <= n_workers; ++cx) {
    if (n_workers % cx != 0) continue;
    const int cy = n_workers / cx;
    out.push_back(LayoutInfo{cx, cy, internal_edge_count(cx, cy)});
  }
  return out;
}

}  // namespace floodsim
