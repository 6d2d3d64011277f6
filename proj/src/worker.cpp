#include "worker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>

namespace floodsim {

StepPlan plan_steps(double start_time, double duration, double dt) {
  if (!(dt > 0.0)) throw std::runtime_error("dt must be positive");
  if (!(duration > 0.0)) throw std::runtime_error("duration must be positive");
  StepPlan plan;
  plan.start_time = start_time;
  plan.dt = dt;
  // Nudge before flooring so durations that are exact multiples of dt in
  // real arithmetic stay exact despite binary rounding (e.g. 172800 / 0.1).
  const int64_t full = static_cast<int64_t>(std::floor(duration / dt + 1e-9));
  const double residual = duration - static_cast<double>(full) * dt;
  if (residual > 1e-9 * dt) {
    plan.n_steps = full + 1;
    plan.last_dt = residual;
  } else {
    plan.n_steps = full;
    plan.last_dt = 0.0;
  }
  return plan;
}

namespace {

constexpr Side kExchangeOrder[4] = {Side::west, Side::east, Side::north, Side::south};

int side_index(Side s) { return static_cast<int>(s); }

}  // namespace

struct WorkerPool::Slot {
  TileExtent ext;
  TileState tile;
  Channel* out[4] = {nullptr, nullptr, nullptr, nullptr};
  Channel* in[4] = {nullptr, nullptr, nullptr, nullptr};

  // One boundary face this worker owns inside a section. For inflow faces
  // cell_idx points into the section's static cell list.
  struct BcFace {
    bool is_qx = true;
    int fi = 0, fj = 0;    // face coords in the local flux grid
    int li = 0, lj = 0;    // adjacent owned cell (outflow reads h, n here)
    float sign = 1.0f;     // +1 along +x/+y, -1 otherwise
    size_t cell_idx = 0;
  };
  std::vector<BcFace> inflow_faces;
  std::vector<BcFace> outflow_faces;

  LedgerTotals ledger;
  TimingTotals timing;
  std::exception_ptr error;

  GlobalEdges edges() const {
    GlobalEdges e;
    e.north = ext.global_edge[side_index(Side::north)];
    e.south = ext.global_edge[side_index(Side::south)];
    e.east = ext.global_edge[side_index(Side::east)];
    e.west = ext.global_edge[side_index(Side::west)];
    return e;
  }

  // Owned boundary faces of a section on a global side. `range` indexes rows
  // for east/west sides, columns otherwise.
  static std::vector<BcFace> section_faces(const TileExtent& ext, Side side,
                                           const IndexRange& range, bool inward) {
    std::vector<BcFace> out;
    if (!ext.global_edge[side_index(side)]) return out;
    const bool row_indexed = (side == Side::west || side == Side::east);
    const int64_t lo = row_indexed ? ext.row0 : ext.col0;
    const int64_t len = row_indexed ? ext.rows : ext.cols;
    const int64_t begin = std::max(range.begin, lo);
    const int64_t end = std::min(range.end, lo + len);
    const int R = static_cast<int>(ext.rows), C = static_cast<int>(ext.cols);
    for (int64_t g = begin; g < end; ++g) {
      BcFace f;
      f.cell_idx = static_cast<size_t>(g - range.begin);
      const int local = static_cast<int>(g - lo) + 1;
      switch (side) {
        case Side::west:
          f.is_qx = true; f.fi = local; f.fj = 1; f.li = local; f.lj = 1;
          f.sign = inward ? 1.0f : -1.0f;
          break;
        case Side::east:
          f.is_qx = true; f.fi = local; f.fj = C + 1; f.li = local; f.lj = C;
          f.sign = inward ? -1.0f : 1.0f;
          break;
        case Side::north:
          f.is_qx = false; f.fi = 1; f.fj = local; f.li = 1; f.lj = local;
          f.sign = inward ? 1.0f : -1.0f;
          break;
        case Side::south:
          f.is_qx = false; f.fi = R + 1; f.fj = local; f.li = R; f.lj = local;
          f.sign = inward ? -1.0f : 1.0f;
          break;
      }
      out.push_back(f);
    }
    return out;
  }
};

namespace {

// Strip geometry for one field and side: where the border to send lives and
// where the received ghost strip goes. Cell-axis strips sit at index 1 /
// size-1; on a face-staggered axis the seam face is index 1 and duplicated
// on both owners, so the sent strip is one further in (index 2 / size-2 on
// the far side is symmetric by construction).
struct Strip {
  bool is_row;    // row strip (north/south) vs column strip (east/west)
  int send_idx;   // row or column index to send
  int ghost_idx;  // row or column index to fill on receive
  int lo, hi;     // inclusive range along the strip
};

Strip strip_for(FieldTag f, Side side, int R, int C) {
  Strip s{};
  const bool x_staggered = (f == FieldTag::qx);  // extra face column
  const bool y_staggered = (f == FieldTag::qy);  // extra face row
  const int last_col = C + (x_staggered ? 1 : 0);
  const int last_row = R + (y_staggered ? 1 : 0);
  switch (side) {
    case Side::west:
      s.is_row = false;
      s.send_idx = x_staggered ? 2 : 1;
      s.ghost_idx = 0;
      s.lo = 1; s.hi = last_row;
      break;
    case Side::east:
      s.is_row = false;
      s.send_idx = x_staggered ? last_col - 1 : last_col;
      s.ghost_idx = last_col + 1;
      s.lo = 1; s.hi = last_row;
      break;
    case Side::north:
      s.is_row = true;
      s.send_idx = y_staggered ? 2 : 1;
      s.ghost_idx = 0;
      s.lo = 1; s.hi = last_col;
      break;
    case Side::south:
      s.is_row = true;
      s.send_idx = y_staggered ? last_row - 1 : last_row;
      s.ghost_idx = last_row + 1;
      s.lo = 1; s.hi = last_col;
      break;
  }
  return s;
}

Grid2f& field_grid(TileState& t, FieldTag f) {
  switch (f) {
    case FieldTag::h: return t.h;
    case FieldTag::qx: return t.qx_cur();
    default: return t.qy_cur();
  }
}

std::vector<float> extract_strip(const Grid2f& g, const Strip& s) {
  std::vector<float> v;
  v.reserve(static_cast<size_t>(s.hi - s.lo + 1));
  if (s.is_row)
    for (int j = s.lo; j <= s.hi; ++j) v.push_back(g.at(s.send_idx, j));
  else
    for (int i = s.lo; i <= s.hi; ++i) v.push_back(g.at(i, s.send_idx));
  return v;
}

void apply_strip(Grid2f& g, const Strip& s, const std::vector<float>& v) {
  size_t k = 0;
  if (s.is_row)
    for (int j = s.lo; j <= s.hi; ++j) g.at(s.ghost_idx, j) = v[k++];
  else
    for (int i = s.lo; i <= s.hi; ++i) g.at(i, s.ghost_idx) = v[k++];
}

// Zero-gradient fill of the h ghost strip at a global boundary. The
// reflect-wall mode coincides with replication here because global-boundary
// fluxes are pinned (zero or boundary-condition values), so h ghosts never
// drive flow across the wall.
void replicate_h_ghost(Grid2f& h, Side side, int R, int C) {
  switch (side) {
    case Side::west:
      for (int i = 1; i <= R; ++i) h.at(i, 0) = h.at(i, 1);
      break;
    case Side::east:
      for (int i = 1; i <= R; ++i) h.at(i, C + 1) = h.at(i, C);
      break;
    case Side::north:
      for (int j = 1; j <= C; ++j) h.at(0, j) = h.at(1, j);
      break;
    case Side::south:
      for (int j = 1; j <= C; ++j) h.at(R + 1, j) = h.at(R, j);
      break;
  }
}

}  // namespace

WorkerPool::WorkerPool(const Raster& z, const Raster& manning, const Raster& h0,
                       const Topology& topo, const PoolConfig& cfg)
    : topo_(topo), cfg_(cfg), dx_(z.cell_size) {
  auto check = [&](const Raster& r, const char* name) {
    if (r.rows != topo.rows || r.cols != topo.cols)
      throw std::runtime_error(std::string(name) + " dims do not match the padded topology");
  };
  check(z, "DEM");
  check(manning, "Manning field");
  check(h0, "initial depth");
  for (float v : manning.values)
    if (!(v > 0.0f)) throw std::runtime_error("Manning field must be positive everywhere");
  for (float v : h0.values)
    if (!(v >= 0.0f)) throw std::runtime_error("initial depth must be nonnegative");

  const int n = topo.worker_count();
  workers_.reserve(static_cast<size_t>(n));
  for (int w = 0; w < n; ++w) {
    auto slot = std::make_unique<Slot>();
    slot->ext = topo.tile(w);
    const TileExtent& e = slot->ext;
    slot->tile = TileState(static_cast<int>(e.rows), static_cast<int>(e.cols));
    // Ghost ring filled from the global grid: interior ghosts get the true
    // neighbor values ("halos correct by initialization"), global edges the
    // replicated edge value.
    for (int i = 0; i <= static_cast<int>(e.rows) + 1; ++i) {
      const int64_t gi = std::clamp<int64_t>(e.row0 + i - 1, 0, topo.rows - 1);
      for (int j = 0; j <= static_cast<int>(e.cols) + 1; ++j) {
        const int64_t gj = std::clamp<int64_t>(e.col0 + j - 1, 0, topo.cols - 1);
        slot->tile.z.at(i, j) = z.at(gi, gj);
        slot->tile.n.at(i, j) = manning.at(gi, gj);
        slot->tile.h.at(i, j) = h0.at(gi, gj);
      }
    }
    if (cfg_.inflow)
      slot->inflow_faces = Slot::section_faces(e, cfg_.inflow->side, cfg_.inflow->range, true);
    if (cfg_.outflow)
      slot->outflow_faces = Slot::section_faces(e, cfg_.outflow->side, cfg_.outflow->range, false);
    workers_.push_back(std::move(slot));
  }

  // One FIFO per directed neighbor link.
  std::vector<Channel*> by_pair(static_cast<size_t>(n) * n, nullptr);
  for (int w = 0; w < n; ++w) {
    for (Side s : kExchangeOrder) {
      const auto& nbr = topo.tile(w).neighbor[side_index(s)];
      if (!nbr) continue;
      channels_.push_back(std::make_unique<Channel>(&abort_));
      by_pair[static_cast<size_t>(w) * n + *nbr] = channels_.back().get();
    }
  }
  for (int w = 0; w < n; ++w) {
    for (Side s : kExchangeOrder) {
      const auto& nbr = topo.tile(w).neighbor[side_index(s)];
      if (!nbr) continue;
      workers_[static_cast<size_t>(w)]->out[side_index(s)] =
          by_pair[static_cast<size_t>(w) * n + *nbr];
      workers_[static_cast<size_t>(w)]->in[side_index(s)] =
          by_pair[static_cast<size_t>(*nbr) * n + w];
    }
  }
}

WorkerPool::~WorkerPool() = default;

void WorkerPool::exchange_field(Slot& w, FieldTag f, int64_t step) {
  const int R = w.tile.rows, C = w.tile.cols;
  Grid2f& g = field_grid(w.tile, f);
  for (Side side : kExchangeOrder) {
    const Strip strip = strip_for(f, side, R, C);
    const int k = side_index(side);
    if (w.out[k]) {
      HaloPacket p;
      p.source = w.ext.worker;
      p.side = opposite(side);
      p.field = f;
      p.step = step;
      p.payload = extract_strip(g, strip);
      w.out[k]->send(std::move(p));
    }
    if (w.in[k]) {
      HaloPacket p = w.in[k]->recv();
      if (p.field != f || p.side != side || p.step != step)
        throw std::runtime_error(
            "halo protocol violation at worker " + std::to_string(w.ext.worker) + ": expected " +
            to_string(f) + "/" + to_string(side) + "/step " + std::to_string(step) + ", got " +
            to_string(p.field) + "/" + to_string(p.side) + "/step " + std::to_string(p.step));
      const size_t expected = static_cast<size_t>(strip.hi - strip.lo + 1);
      if (p.payload.size() != expected)
        throw std::runtime_error("halo payload length mismatch at worker " +
                                 std::to_string(w.ext.worker) + ": expected " +
                                 std::to_string(expected) + ", got " +
                                 std::to_string(p.payload.size()));
      apply_strip(g, strip, p.payload);
    } else if (f == FieldTag::h) {
      replicate_h_ghost(g, side, R, C);
    }
    // Flux ghosts beyond the global boundary stay zero; the interior update
    // never reads them.
  }
}

void WorkerPool::apply_boundary(Slot& w, double t, double dt, const PhysicsParams&) {
  if (cfg_.inflow && !w.inflow_faces.empty()) {
    const double q_total = cfg_.inflow->discharge.value_at(t);
    const InflowSolution sol =
        solve_inflow_level(cfg_.inflow->cells, q_total, cfg_.inflow->slope, dx_);
    for (const auto& f : w.inflow_faces) {
      const float q_face = static_cast<float>(sol.q_cell[f.cell_idx] / dx_);
      Grid2f& g = f.is_qx ? w.tile.qx_cur() : w.tile.qy_cur();
      g.at(f.fi, f.fj) = f.sign * q_face;
      w.ledger.inflow += static_cast<double>(q_face) * dx_ * dt;
    }
  }
  if (cfg_.outflow) {
    for (const auto& f : w.outflow_faces) {
      const double h = static_cast<double>(w.tile.h.at(f.li, f.lj));
      const double n = static_cast<double>(w.tile.n.at(f.li, f.lj));
      double q = manning_flux(h, cfg_.outflow->slope, n, dx_) / dx_;
      // A cell may not export more volume than it holds in one step; the
      // small shave absorbs the double->float rounding of the stored face.
      const double cap = h * dx_ / dt * (1.0 - 1e-7);
      if (q > cap) q = cap;
      const float q_face = static_cast<float>(q);
      Grid2f& g = f.is_qx ? w.tile.qx_cur() : w.tile.qy_cur();
      g.at(f.fi, f.fj) = f.sign * q_face;
      w.ledger.outflow += static_cast<double>(q_face) * dx_ * dt;
    }
  }
}

void WorkerPool::worker_body(Slot& w, const StepPlan& plan, int64_t first, int64_t count) {
  using clock = std::chrono::steady_clock;
  PhysicsParams p;
  p.g = static_cast<float>(cfg_.g);
  p.dx = static_cast<float>(dx_);
  p.h_min = static_cast<float>(cfg_.h_min);
  const GlobalEdges edges = w.edges();

  for (int64_t s = 0; s < count; ++s) {
    const int64_t k = first + s;
    const double dt = plan.dt_at(k);
    p.dt = static_cast<float>(dt);

    const auto t0 = clock::now();
    exchange_field(w, FieldTag::qx, k);
    exchange_field(w, FieldTag::qy, k);
    const auto t1 = clock::now();

    update_flux(w.tile, p, edges);
    apply_boundary(w, plan.time_at(k), dt, p);
    StepDiag diag;
    update_depth(w.tile, p, diag);
    w.ledger.clamped += diag.clamped_volume;
    const auto t2 = clock::now();

    exchange_field(w, FieldTag::h, k);
    const auto t3 = clock::now();

    w.timing.exchange_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count() +
                            std::chrono::duration_cast<std::chrono::nanoseconds>(t3 - t2).count();
    w.timing.compute_ns +=
        std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
    w.timing.steps += 1;
  }
}

void WorkerPool::run_parallel(const std::function<void(Slot&)>& fn) {
  if (abort_.load()) throw std::runtime_error("worker pool is aborted");
  std::vector<std::thread> threads;
  threads.reserve(workers_.size());
  for (auto& w : workers_) {
    w->error = nullptr;
    threads.emplace_back([this, &fn, slot = w.get()] {
      try {
        fn(*slot);
      } catch (...) {
        slot->error = std::current_exception();
        abort_.store(true);
        for (auto& ch : channels_) ch->wake_all();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (abort_.load()) {
    // Prefer the root cause over secondary PoolAborted unwinds.
    std::exception_ptr first;
    for (auto& w : workers_) {
      if (!w->error) continue;
      try {
        std::rethrow_exception(w->error);
      } catch (const PoolAborted&) {
        if (!first) first = w->error;
      } catch (...) {
        std::rethrow_exception(w->error);
      }
    }
    if (first) std::rethrow_exception(first);
    throw std::runtime_error("worker pool aborted without a recorded error");
  }
}

void WorkerPool::run_steps(const StepPlan& plan, int64_t first, int64_t count) {
  if (count <= 0) return;
  run_parallel([this, &plan, first, count](Slot& w) { worker_body(w, plan, first, count); });
  step_ = first + count;
}

void WorkerPool::exchange_only(FieldTag field) {
  run_parallel([this, field](Slot& w) { exchange_field(w, field, step_); });
}

Raster WorkerPool::gather_h() const {
  Raster out = make_raster(topo_.rows, topo_.cols, dx_);
  for (const auto& w : workers_) {
    const TileExtent& e = w->ext;
    for (int i = 1; i <= static_cast<int>(e.rows); ++i)
      for (int j = 1; j <= static_cast<int>(e.cols); ++j)
        out.at(e.row0 + i - 1, e.col0 + j - 1) = w->tile.h.at(i, j);
  }
  return out;
}

Raster WorkerPool::gather_qx() const {
  Raster out = make_raster(topo_.rows, topo_.cols + 1, dx_);
  for (const auto& w : workers_) {
    const TileExtent& e = w->ext;
    const Grid2f& qx = w->tile.qx_cur();
    for (int i = 1; i <= static_cast<int>(e.rows); ++i)
      for (int j = 1; j <= static_cast<int>(e.cols) + 1; ++j)
        out.at(e.row0 + i - 1, e.col0 + j - 1) = qx.at(i, j);
  }
  return out;
}

Raster WorkerPool::gather_qy() const {
  Raster out = make_raster(topo_.rows + 1, topo_.cols, dx_);
  for (const auto& w : workers_) {
    const TileExtent& e = w->ext;
    const Grid2f& qy = w->tile.qy_cur();
    for (int i = 1; i <= static_cast<int>(e.rows) + 1; ++i)
      for (int j = 1; j <= static_cast<int>(e.cols); ++j)
        out.at(e.row0 + i - 1, e.col0 + j - 1) = qy.at(i, j);
  }
  return out;
}

double WorkerPool::total_volume() const {
  const double area = dx_ * dx_;
  double total = 0.0;
  for (const auto& w : workers_) {
    double tile_sum = 0.0;
    for (int i = 1; i <= w->tile.rows; ++i)
      for (int j = 1; j <= w->tile.cols; ++j)
        tile_sum += static_cast<double>(w->tile.h.at(i, j));
    total += tile_sum;
  }
  return total * area;
}

LedgerTotals WorkerPool::ledger() const {
  LedgerTotals t;
  for (const auto& w : workers_) {
    t.inflow += w->ledger.inflow;
    t.outflow += w->ledger.outflow;
    t.clamped += w->ledger.clamped;
  }
  return t;
}

TimingTotals WorkerPool::timings() const {
  TimingTotals t;
  for (const auto& w : workers_) {
    t.compute_ns += w->timing.compute_ns;
    t.exchange_ns += w->timing.exchange_ns;
    t.steps += w->timing.steps;
  }
  return t;
}

void WorkerPool::reset_timings() {
  for (auto& w : workers_) w->timing = TimingTotals{};
}

Channel* WorkerPool::channel_between(int from, int to) {
  const auto& tile = topo_.tile(from);
  for (Side s : kExchangeOrder) {
    const auto& nbr = tile.neighbor[side_index(s)];
    if (nbr && *nbr == to) return workers_[static_cast<size_t>(from)]->out[side_index(s)];
  }
  return nullptr;
}

TileState& WorkerPool::tile(int worker) { return workers_[static_cast<size_t>(worker)]->tile; }

}  // namespace floodsim
