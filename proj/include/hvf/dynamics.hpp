#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "hvf/dataset.hpp"
#include "hvf/maze.hpp"
#include "hvf/raster.hpp"

namespace hvf {

// Frame predictor over a frozen scene. Contract: final_frame(s, a) equals
// rollout(s, a).back() bitwise, it just skips the intermediate renders.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;
  virtual void rollout(const MazeState& start, std::span<const Action> actions,
                       std::vector<Frame>& out) const = 0;
  virtual void final_frame(const MazeState& start, std::span<const Action> actions,
                           Frame& out) const = 0;
  virtual void start_frame(const MazeState& s, Frame& out) const = 0;
  virtual const RasterConfig& raster() const = 0;
};

namespace detail {
inline void check_action_count(std::size_t n) {
  if (n < 1 || n > 64) throw std::invalid_argument("rollout: need 1..64 actions");
}
}  // namespace detail

// Ground-truth simulator wrapped in the frame-prediction interface.
class OracleDynamics : public DynamicsModel {
 public:
  OracleDynamics(const RasterConfig& raster, double a_max)
      : raster_(raster), a_max_(a_max) {}

  void rollout(const MazeState& start, std::span<const Action> actions,
               std::vector<Frame>& out) const override {
    detail::check_action_count(actions.size());
    out.resize(actions.size());
    MazeState s = start;
    for (std::size_t t = 0; t < actions.size(); ++t) {
      s = step(s, actions[t], a_max_);
      render_into(s, raster_, out[t]);
    }
  }

  void final_frame(const MazeState& start, std::span<const Action> actions,
                   Frame& out) const override {
    detail::check_action_count(actions.size());
    MazeState s = start;
    for (const Action& a : actions) s = step(s, a, a_max_);
    render_into(s, raster_, out);
  }

  void start_frame(const MazeState& s, Frame& out) const override {
    render_into(s, raster_, out);
  }

  const RasterConfig& raster() const override { return raster_; }

 private:
  RasterConfig raster_;
  double a_max_;
};

// k-nearest-neighbour displacement regressor fit on random-interaction data.
// Query coordinates are (x, y, ax/a_max, ay/a_max); prediction is the
// inverse-distance-weighted mean displacement of the k nearest tuples.
class SurrogateModel : public DynamicsModel {
 public:
  static constexpr int kGrid = 16;

  SurrogateModel(const RasterConfig& raster, double a_max, int k)
      : raster_(raster), a_max_(a_max), k_(k) {
    if (k < 1) throw std::invalid_argument("surrogate: k must be positive");
  }

  void add_sample(Vec2 pos, Action a, Vec2 displacement) {
    points_.push_back({pos.x, pos.y, a.delta.x / a_max_, a.delta.y / a_max_});
    disp_.push_back(displacement);
  }

  void build_index() {
    cells_.assign(kGrid * kGrid, {});
    for (std::size_t i = 0; i < points_.size(); ++i)
      cells_[cell_of(points_[i][0], points_[i][1])].push_back(uint32_t(i));
  }

  std::size_t sample_count() const { return points_.size(); }
  double held_out_error() const { return held_out_error_; }
  void set_held_out_error(double e) { held_out_error_ = e; }
  int k() const { return k_; }
  double a_max() const { return a_max_; }

  // Weighted k-NN displacement; ties broken by sample index so queries are
  // order-independent.
  Vec2 predict(Vec2 pos, Action a) const {
    if (points_.size() < std::size_t(k_))
      throw std::runtime_error("surrogate: fewer samples than k");
    // the true dynamics are identity under a zero action; bake that in
    if (a.delta.x == 0.0 && a.delta.y == 0.0) return {0.0, 0.0};
    const std::array<double, 4> q{pos.x, pos.y, a.delta.x / a_max_, a.delta.y / a_max_};
    std::vector<std::pair<double, uint32_t>> best;  // (dist2, index), size <= k
    best.reserve(k_ + 1);
    auto offer = [&](uint32_t idx) {
      double d2 = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double d = q[c] - points_[idx][c];
        d2 += d * d;
      }
      const std::pair<double, uint32_t> cand{d2, idx};
      if (best.size() == std::size_t(k_) && cand >= best.back()) return;
      auto it = std::lower_bound(best.begin(), best.end(), cand);
      best.insert(it, cand);
      if (best.size() > std::size_t(k_)) best.pop_back();
    };

    const int cr = std::clamp(int(pos.y * kGrid), 0, kGrid - 1);
    const int cc = std::clamp(int(pos.x * kGrid), 0, kGrid - 1);
    const double cell_w = 1.0 / kGrid;
    for (int ring = 0; ring < kGrid; ++ring) {
      // Once the ring is provably farther than the kth best in position
      // alone, no sample in it can enter the neighbour set.
      if (best.size() == std::size_t(k_)) {
        const double ring_gap = (ring - 1) * cell_w;
        if (ring_gap > 0.0 && ring_gap * ring_gap > best.back().first) break;
      }
      bool any = false;
      for (int r = cr - ring; r <= cr + ring; ++r) {
        if (r < 0 || r >= kGrid) continue;
        for (int c = cc - ring; c <= cc + ring; ++c) {
          if (c < 0 || c >= kGrid) continue;
          if (std::max(std::abs(r - cr), std::abs(c - cc)) != ring) continue;
          any = true;
          for (uint32_t idx : cells_[r * kGrid + c]) offer(idx);
        }
      }
      if (!any && ring > 0 && best.size() == std::size_t(k_)) break;
    }

    // Inverse-distance weights; an exact hit short-circuits to its value.
    Vec2 acc{0.0, 0.0};
    double wsum = 0.0;
    for (const auto& [d2, idx] : best) {
      if (d2 <= 1e-24) return disp_[idx];
      const double w = 1.0 / std::sqrt(d2);
      acc = acc + w * disp_[idx];
      wsum += w;
    }
    return (1.0 / wsum) * acc;
  }

  // Predicted positions are clipped to the arena and nudged out of walls so
  // predicted frames always show a physically possible agent.
  void rollout(const MazeState& start, std::span<const Action> actions,
               std::vector<Frame>& out) const override {
    detail::check_action_count(actions.size());
    out.resize(actions.size());
    Vec2 p = start.agent;
    for (std::size_t t = 0; t < actions.size(); ++t) {
      p = advance(start.layout, p, actions[t]);
      render_into(MazeState{p, start.goal, start.layout}, raster_, out[t]);
    }
  }

  void final_frame(const MazeState& start, std::span<const Action> actions,
                   Frame& out) const override {
    detail::check_action_count(actions.size());
    Vec2 p = start.agent;
    for (const Action& a : actions) p = advance(start.layout, p, a);
    render_into(MazeState{p, start.goal, start.layout}, raster_, out);
  }

  void start_frame(const MazeState& s, Frame& out) const override {
    render_into(s, raster_, out);
  }

  const RasterConfig& raster() const override { return raster_; }

  // One predicted transition: clip, predict, clamp, project out of walls.
  Vec2 advance(const WallLayout& layout, Vec2 p, Action a) const {
    const Action c = clip_action(a, a_max_);
    Vec2 q = p + predict(p, c);
    q.x = std::clamp(q.x, 0.0, 1.0);
    q.y = std::clamp(q.y, 0.0, 1.0);
    if (in_wall(layout, q)) q = project_to_free(layout, q, 1e-9);
    return q;
  }

 private:
  static int cell_of(double x, double y) {
    const int c = std::clamp(int(x * kGrid), 0, kGrid - 1);
    const int r = std::clamp(int(y * kGrid), 0, kGrid - 1);
    return r * kGrid + c;
  }

  RasterConfig raster_;
  double a_max_;
  int k_;
  std::vector<std::array<double, 4>> points_;
  std::vector<Vec2> disp_;
  std::vector<std::vector<uint32_t>> cells_;
  double held_out_error_ = 0.0;
};

// Fit on every transition except a held-out slice (every 10th), which scores
// the model. Reported error is mean Euclidean displacement error.
inline SurrogateModel fit_surrogate(const InteractionDataset& data,
                                    const RasterConfig& raster, double a_max,
                                    int k) {
  if (data.transition_count() < 1000)
    throw std::invalid_argument("fit_surrogate: need at least 1000 transitions");
  SurrogateModel m(raster, a_max, k);
  struct Held {
    Vec2 pos, truth;
    Action act;
  };
  std::vector<Held> held;
  std::size_t idx = 0;
  for (const Episode& e : data.episodes) {
    for (std::size_t t = 0; t < e.actions.size(); ++t, ++idx) {
      const Vec2 d = e.positions[t + 1] - e.positions[t];
      if (idx % 10 == 9) held.push_back({e.positions[t], d, e.actions[t]});
      else m.add_sample(e.positions[t], e.actions[t], d);
    }
  }
  m.build_index();
  double err = 0.0;
  for (const Held& h : held) err += norm(m.predict(h.pos, h.act) - h.truth);
  m.set_held_out_error(held.empty() ? 0.0 : err / double(held.size()));
  return m;
}

// Decorator that counts model-predicted frames; the benchmark uses the count
// as a deterministic compute measure.
class CountingDynamics : public DynamicsModel {
 public:
  explicit CountingDynamics(const DynamicsModel& inner) : inner_(inner) {}

  uint64_t frames_predicted() const { return frames_.load(std::memory_order_relaxed); }

  void rollout(const MazeState& s, std::span<const Action> a,
               std::vector<Frame>& out) const override {
    frames_.fetch_add(a.size(), std::memory_order_relaxed);
    inner_.rollout(s, a, out);
  }
  void final_frame(const MazeState& s, std::span<const Action> a,
                   Frame& out) const override {
    frames_.fetch_add(a.size(), std::memory_order_relaxed);
    inner_.final_frame(s, a, out);
  }
  void start_frame(const MazeState& s, Frame& out) const override {
    inner_.start_frame(s, out);
  }
  const RasterConfig& raster() const override { return inner_.raster(); }

 private:
  const DynamicsModel& inner_;
  mutable std::atomic<uint64_t> frames_{0};
};

}  // namespace hvf
