#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "boundary.hpp"  // Side

namespace floodsim {

enum class FieldTag { h, qx, qy };

inline const char* to_string(FieldTag f) {
  switch (f) {
    case FieldTag::h: return "h";
    case FieldTag::qx: return "qx";
    default: return "qy";
  }
}

inline Side opposite(Side s) {
  switch (s) {
    case Side::north: return Side::south;
    case Side::south: return Side::north;
    case Side::east: return Side::west;
    default: return Side::east;
  }
}

// One border strip in flight between neighbors. `side` is receiver-relative:
// the ghost strip this packet refreshes.
struct HaloPacket {
  int source = 0;
  Side side = Side::west;
  FieldTag field = FieldTag::h;
  int64_t step = 0;
  std::vector<float> payload;
};

// Raised by receivers when a peer worker failed and the pool is shutting
// down; carries no diagnostic value of its own.
struct PoolAborted : std::runtime_error {
  PoolAborted() : std::runtime_error("worker pool aborted") {}
};

// Unbounded point-to-point FIFO. Senders never block, so the fixed
// W,E,N,S send-then-receive exchange order cannot deadlock.
class Channel {
 public:
  explicit Channel(const std::atomic<bool>* abort_flag) : abort_(abort_flag) {}

  void send(HaloPacket&& p) {
    {
      std::lock_guard<std::mutex> lk(m_);
      q_.push_back(std::move(p));
    }
    cv_.notify_one();
  }

  HaloPacket recv() {
    std::unique_lock<std::mutex> lk(m_);
    cv_.wait(lk, [&] { return !q_.empty() || (abort_ && abort_->load()); });
    if (q_.empty()) throw PoolAborted{};
    HaloPacket p = std::move(q_.front());
    q_.pop_front();
    return p;
  }

  // Wakes blocked receivers after the pool abort flag is set.
  void wake_all() { cv_.notify_all(); }

 private:
  const std::atomic<bool>* abort_;
  std::mutex m_;
  std::condition_variable cv_;
  std::deque<HaloPacket> q_;
};

}  // namespace floodsim
