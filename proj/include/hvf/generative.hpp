#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

#include "hvf/maze.hpp"
#include "hvf/raster.hpp"

namespace hvf {

// Decodes a latent vector into a hypothetical scene frame conditioned on the
// current observation's layout and goal.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;
  virtual int latent_dim() const = 0;
  virtual MazeState decode_state(std::span<const double> z,
                                 const MazeState& cond) const = 0;
  virtual Frame decode(std::span<const double> z, const MazeState& cond) const = 0;
};

// Stand-in for a learned image generator: the first two latent channels place
// the agent through a logistic squash, the rest are dead capacity kept so the
// search dimensionality matches a richer model. Positions stay on the data
// manifold of real observations: clamped so the rendered blob lies fully
// inside the frame (a border-clipped blob sheds mismatch pixels, which would
// let the subgoal search fake sub-plateau costs by parking goals at the image
// edge), and snapped out of walls with the same clearance.
class FreeSpaceDecoder : public GenerativeModel {
 public:
  FreeSpaceDecoder(const RasterConfig& raster, int latent_dim)
      : raster_(raster),
        latent_dim_(latent_dim),
        margin_(double(raster.blob_px) / 2.0 / double(raster.resolution)) {
    if (latent_dim < 2) throw std::invalid_argument("decoder: latent_dim < 2");
    // cells whose paint window fits on both axes (the y flip shifts it by one)
    const int lo_cell = raster.blob_px / 2;
    const int hi_cell = raster.resolution - 1 - raster.blob_px / 2;
    frame_lo_ = (lo_cell + 0.5) / double(raster.resolution);
    frame_hi_ = (hi_cell + 0.5) / double(raster.resolution);
  }

  int latent_dim() const override { return latent_dim_; }
  double wall_margin() const { return margin_; }
  double frame_lo() const { return frame_lo_; }
  double frame_hi() const { return frame_hi_; }

  MazeState decode_state(std::span<const double> z,
                         const MazeState& cond) const override {
    if (int(z.size()) != latent_dim_)
      throw std::invalid_argument("decoder: latent size mismatch");
    Vec2 p{logistic(z[0]), logistic(z[1])};
    p.x = std::clamp(p.x, frame_lo_, frame_hi_);
    p.y = std::clamp(p.y, frame_lo_, frame_hi_);
    if (in_wall(cond.layout, p)) p = project_to_free(cond.layout, p, margin_);
    return MazeState{p, cond.goal, cond.layout};
  }

  Frame decode(std::span<const double> z, const MazeState& cond) const override {
    return render(decode_state(z, cond), raster_);
  }

  const RasterConfig& raster() const { return raster_; }

  static double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

  // Inverse of the squash, clamped away from the open interval's ends so
  // boundary positions stay finite.
  static double logit(double p) {
    const double c = std::clamp(p, 1e-9, 1.0 - 1e-9);
    return std::log(c / (1.0 - c));
  }

 private:
  RasterConfig raster_;
  int latent_dim_;
  double margin_;
  double frame_lo_ = 0.0;
  double frame_hi_ = 1.0;
};

}  // namespace hvf
