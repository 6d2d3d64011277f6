#include "swe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace floodsim {

TileState::TileState(int rows_, int cols_) : rows(rows_), cols(cols_) {
  if (rows < 1 || cols < 1) throw std::runtime_error("tile dims must be >= 1");
  h = Grid2f(rows + 2, cols + 2);
  z = Grid2f(rows + 2, cols + 2);
  n = Grid2f(rows + 2, cols + 2);
  qx[0] = Grid2f(rows + 2, cols + 3);
  qx[1] = Grid2f(rows + 2, cols + 3);
  qy[0] = Grid2f(rows + 3, cols + 2);
  qy[1] = Grid2f(rows + 3, cols + 2);
}

float flux_face_depth(float h_left, float z_left, float h_right, float z_right) {
  const float eta = std::max(h_left + z_left, h_right + z_right);
  const float bed = std::max(z_left, z_right);
  const float hf = eta - bed;
  return hf > 0.0f ? hf : 0.0f;
}

namespace {

[[noreturn]] void unstable(const char* field, int i, int j) {
  throw std::runtime_error(std::string("nonfinite ") + field + " at face (" + std::to_string(i) +
                           ", " + std::to_string(j) + "): time step unstable");
}

// h_f^(7/3) built from one cube root; cheaper than powf and fixed-expression
// deterministic.
inline float pow73(float hf) {
  const float c = std::cbrt(hf);
  const float c2 = c * c;
  return c2 * c2 * c2 * c;  // c^7 = hf^(7/3)
}

}  // namespace

void update_flux(TileState& t, const PhysicsParams& p, const GlobalEdges& edges) {
  const int R = t.rows, C = t.cols;
  const Grid2f& h = t.h;
  const Grid2f& z = t.z;
  const Grid2f& n = t.n;
  const Grid2f& qx0 = t.qx[t.cur];
  const Grid2f& qy0 = t.qy[t.cur];
  Grid2f& qx1 = t.qx[1 - t.cur];
  Grid2f& qy1 = t.qy[1 - t.cur];

  const float inv_dx = 1.0f / p.dx;
  const float g_dt = p.g * p.dt;

  // x faces: face col j between cells (i, j-1) and (i, j).
  for (int i = 1; i <= R; ++i) {
    for (int j = 1; j <= C + 1; ++j) {
      if ((j == 1 && edges.west) || (j == C + 1 && edges.east)) {
        qx1.at(i, j) = 0.0f;
        continue;
      }
      const float hl = h.at(i, j - 1), zl = z.at(i, j - 1);
      const float hr = h.at(i, j), zr = z.at(i, j);
      const float hf = flux_face_depth(hl, zl, hr, zr);
      float q_new = 0.0f;
      if (hf > p.h_min) {
        const float q_old = qx0.at(i, j);
        const float slope = ((hr + zr) - (hl + zl)) * inv_dx;
        const float qt = 0.25f * (qy0.at(i, j - 1) + qy0.at(i + 1, j - 1) + qy0.at(i, j) +
                                  qy0.at(i + 1, j));
        const float qn = std::sqrt(q_old * q_old + qt * qt);
        const float nf = 0.5f * (n.at(i, j - 1) + n.at(i, j));
        const float num = q_old - g_dt * hf * slope;
        const float fric = qn > 0.0f ? g_dt * nf * nf * qn / pow73(hf) : 0.0f;
        const float den = 1.0f + fric;
        q_new = num / den;
        if (!std::isfinite(q_new)) unstable("qx", i, j);
      }
      qx1.at(i, j) = q_new;
    }
  }

  // y faces: face row i between cells (i-1, j) and (i, j).
  for (int i = 1; i <= R + 1; ++i) {
    const bool boundary_row = (i == 1 && edges.north) || (i == R + 1 && edges.south);
    for (int j = 1; j <= C; ++j) {
      if (boundary_row) {
        qy1.at(i, j) = 0.0f;
        continue;
      }
      const float hu = h.at(i - 1, j), zu = z.at(i - 1, j);
      const float hd = h.at(i, j), zd = z.at(i, j);
      const float hf = flux_face_depth(hu, zu, hd, zd);
      float q_new = 0.0f;
      if (hf > p.h_min) {
        const float q_old = qy0.at(i, j);
        const float slope = ((hd + zd) - (hu + zu)) * inv_dx;
        const float qt = 0.25f * (qx0.at(i - 1, j) + qx0.at(i - 1, j + 1) + qx0.at(i, j) +
                                  qx0.at(i, j + 1));
        const float qn = std::sqrt(q_old * q_old + qt * qt);
        const float nf = 0.5f * (n.at(i - 1, j) + n.at(i, j));
        const float num = q_old - g_dt * hf * slope;
        const float fric = qn > 0.0f ? g_dt * nf * nf * qn / pow73(hf) : 0.0f;
        const float den = 1.0f + fric;
        q_new = num / den;
        if (!std::isfinite(q_new)) unstable("qy", i, j);
      }
      qy1.at(i, j) = q_new;
    }
  }

  t.cur = 1 - t.cur;
}

void update_depth(TileState& t, const PhysicsParams& p, StepDiag& diag) {
  const int R = t.rows, C = t.cols;
  const Grid2f& qx = t.qx_cur();
  const Grid2f& qy = t.qy_cur();
  const float dt_over_dx = p.dt / p.dx;
  const double cell_area = static_cast<double>(p.dx) * static_cast<double>(p.dx);

  for (int i = 1; i <= R; ++i) {
    for (int j = 1; j <= C; ++j) {
      const float div = (qx.at(i, j) - qx.at(i, j + 1)) + (qy.at(i, j) - qy.at(i + 1, j));
      float h_new = t.h.at(i, j) + dt_over_dx * div;
      if (!std::isfinite(h_new)) unstable("h", i, j);
      if (h_new < 0.0f) {
        diag.clamped_volume += static_cast<double>(h_new) * cell_area;
        h_new = 0.0f;
      }
      t.h.at(i, j) = h_new;
    }
  }
}

}  // namespace floodsim
