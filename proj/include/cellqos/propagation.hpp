#pragma once

// Propagation loss between every station and every pixel of a raster
// covering the observation window: distance path loss (K r)^beta times an
// optional log-normal shadowing field per station.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cellqos/geometry.hpp"

namespace cellqos {

struct PathLossParams {
  double k_per_km = 7117.0;
  double beta = 3.8;

  void validate() const;

  friend bool operator==(const PathLossParams&, const PathLossParams&) = default;
};

struct ShadowingParams {
  bool enabled = false;
  double sigma_db = 10.0;
  double corr_dist_km = 0.05;

  // Standard deviation of ln S.
  double log_sigma() const;
  void validate() const;

  friend bool operator==(const ShadowingParams&, const ShadowingParams&) = default;
};

// Square raster over the window's bounding box; only pixels whose centers
// fall inside the window are kept, in row-major raster order.
class Grid {
 public:
  Grid(const Window& window, double pixel_size_km);

  const Window& window() const { return window_; }
  double pixel_size() const { return pixel_size_; }
  double pixel_area() const { return pixel_size_ * pixel_size_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return xs_.size(); }

  // Sum of pixel areas; equals the window area up to quantization.
  double covered_area() const { return pixel_area() * static_cast<double>(size()); }

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  Point center(std::size_t pixel) const { return {xs_[pixel], ys_[pixel]}; }

  // Raster cell (column + nx * row) of a kept pixel.
  std::size_t raster_index(std::size_t pixel) const { return raster_[pixel]; }

 private:
  Window window_;
  double pixel_size_;
  std::size_t nx_ = 0, ny_ = 0;
  std::vector<double> xs_, ys_;
  std::vector<std::size_t> raster_;
};

// (k r)^beta; zero at r = 0.
double path_loss(double r_km, const PathLossParams& params);

// E[S^(2/beta)] for ln S ~ Normal(0, (sigma_db ln10 / 10)^2).
double lognormal_equivalence_moment(double sigma_db, double beta);

// Stationary Gaussian fields with covariance s^2 exp(-d / corr_dist),
// synthesized by circulant embedding on the grid raster. Each call to
// next() yields an independent field (ln S on the kept pixels).
class ShadowFieldGenerator {
 public:
  ShadowFieldGenerator(const Grid& grid, const ShadowingParams& params, std::uint64_t seed);
  ~ShadowFieldGenerator();
  ShadowFieldGenerator(const ShadowFieldGenerator&) = delete;
  ShadowFieldGenerator& operator=(const ShadowFieldGenerator&) = delete;

  void next(std::span<double> log_field);

  // Most negative embedding eigenvalue relative to the largest one (clipped
  // to zero during synthesis).
  double negative_eigen_ratio() const;
  const std::vector<std::string>& warnings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ShadowingFields {
  std::vector<std::vector<double>> log_fields;  // [station][pixel], ln S
  std::vector<std::string> warnings;

  double value(std::size_t station, std::size_t pixel) const;  // S
};

ShadowingFields sample_shadowing_fields(const BsPattern& pattern, const Grid& grid,
                                        const ShadowingParams& params, std::uint64_t seed);

// Gains 1/L_X(y) = S_X(y) / l(|y - X|), stored station-major.
class PropagationMap {
 public:
  PropagationMap(Grid grid, std::vector<Point> stations, std::vector<double> gains,
                 std::uint64_t seed, bool shadowed);

  const Grid& grid() const { return grid_; }
  const std::vector<Point>& stations() const { return stations_; }
  std::size_t n_stations() const { return stations_.size(); }
  std::size_t n_pixels() const { return grid_.size(); }
  std::uint64_t seed() const { return seed_; }
  bool shadowed() const { return shadowed_; }

  std::span<const double> gain_row(std::size_t station) const {
    return {gains_.data() + station * n_pixels(), n_pixels()};
  }
  double gain(std::size_t station, std::size_t pixel) const {
    return gains_[station * n_pixels() + pixel];
  }
  // Linear loss factor L_X(y); zero where the pixel center is the station.
  double loss(std::size_t station, std::size_t pixel) const { return 1.0 / gain(station, pixel); }

  std::vector<std::string> warnings;

 private:
  Grid grid_;
  std::vector<Point> stations_;
  std::vector<double> gains_;
  std::uint64_t seed_;
  bool shadowed_;
};

PropagationMap build_propagation_map(const BsPattern& pattern, const Grid& grid,
                                     const PathLossParams& path_loss,
                                     const ShadowingParams& shadowing, std::uint64_t seed);

}  // namespace cellqos
