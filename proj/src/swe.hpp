#pragma once

#include <cstdint>
#include <vector>

namespace floodsim {

// Dense row-major float32 grid used for the dynamic fields. Indexing is
// (row, col) with no bounds checks; callers size it to include ghost cells.
class Grid2f {
 public:
  Grid2f() = default;
  Grid2f(int rows, int cols, float fill = 0.0f)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  float at(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }
  float& at(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  const float* row(int r) const { return v_.data() + static_cast<size_t>(r) * cols_; }
  float* row(int r) { return v_.data() + static_cast<size_t>(r) * cols_; }
  const std::vector<float>& data() const { return v_; }
  std::vector<float>& data() { return v_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<float> v_;
};

struct PhysicsParams {
  float g = 9.80665f;    // m/s^2
  float dt = 0.1f;       // s
  float dx = 1.0f;       // m
  float h_min = 1e-3f;   // wet/dry flux threshold, m
};

// Dynamic state of one subgrid on the staggered grid, all float32.
//
// Layout with a one-deep ghost ring around the owned extent:
//   h, z, n : (rows+2) x (cols+2), owned cells at [1..rows] x [1..cols]
//   qx      : (rows+2) x (cols+3), owned faces at rows [1..rows],
//             face cols [1..cols+1]; face col j sits between cells j-1 and j,
//             positive flux points east (+x, increasing col)
//   qy      : (rows+3) x (cols+2), owned faces at face rows [1..rows+1],
//             cols [1..cols]; face row i sits between cells i-1 and i,
//             positive flux points south (+y, increasing row)
//
// Flux fields are double-buffered because the friction term needs the full
// time-t flux field while time-t+dt values are written.
struct TileState {
  int rows = 0;
  int cols = 0;
  Grid2f h, z, n;
  Grid2f qx[2], qy[2];
  int cur = 0;  // index of the current flux buffers

  TileState() = default;
  TileState(int rows_, int cols_);

  Grid2f& qx_cur() { return qx[cur]; }
  Grid2f& qy_cur() { return qy[cur]; }
  const Grid2f& qx_cur() const { return qx[cur]; }
  const Grid2f& qy_cur() const { return qy[cur]; }
};

// Which sides of the tile lie on the global domain boundary. Faces on the
// global boundary are owned by the boundary-condition pass, never by the
// interior flux update.
struct GlobalEdges {
  bool west = true;
  bool east = true;
  bool north = true;
  bool south = true;
};

// Effective flow depth through a face: the highest free surface minus the
// highest bed, clamped at zero.
float flux_face_depth(float h_left, float z_left, float h_right, float z_right);

// Per-step diagnostics, accumulated in double.
struct StepDiag {
  double clamped_volume = 0.0;  // volume removed by the depth clamp (<= 0 when
                                // negative depths were raised to zero)
};

// Advances all interior fluxes one step (inertial momentum update with
// Manning friction). Reads h and the time-t flux buffers, writes the back
// buffers, then flips `cur`. Global-boundary faces are zeroed in the new
// buffers; the boundary pass overwrites the inflow/outflow sections
// afterwards. Throws on nonfinite output, naming the face.
void update_flux(TileState& t, const PhysicsParams& p, const GlobalEdges& edges);

// Mass-conservation depth update from the current fluxes. Negative depths
// are clamped to zero and the removed volume recorded. Throws on nonfinite
// output.
void update_depth(TileState& t, const PhysicsParams& p, StepDiag& diag);

}  // namespace floodsim
