#include "cellqos/propagation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "cellqos/random.hpp"
#include "cellqos/simd.hpp"

namespace cellqos {

void PathLossParams::validate() const {
  if (!(k_per_km > 0.0)) throw std::invalid_argument("path loss K must be positive");
  if (!(beta > 2.0)) throw std::invalid_argument("path loss exponent beta must exceed 2");
}

double ShadowingParams::log_sigma() const { return sigma_db * std::numbers::ln10 / 10.0; }

void ShadowingParams::validate() const {
  if (!(sigma_db >= 0.0)) throw std::invalid_argument("shadowing sigma_db must be >= 0");
  if (enabled && !(corr_dist_km > 0.0)) {
    throw std::invalid_argument("shadowing correlation distance must be positive");
  }
}

Grid::Grid(const Window& window, double pixel_size_km) : window_(window), pixel_size_(pixel_size_km) {
  if (!(pixel_size_km > 0.0)) throw std::invalid_argument("pixel size must be positive");
  nx_ = static_cast<std::size_t>(std::ceil((window.x1() - window.x0()) / pixel_size_km - 1e-9));
  ny_ = static_cast<std::size_t>(std::ceil((window.y1() - window.y0()) / pixel_size_km - 1e-9));
  nx_ = std::max<std::size_t>(nx_, 1);
  ny_ = std::max<std::size_t>(ny_, 1);
  for (std::size_t row = 0; row < ny_; ++row) {
    for (std::size_t col = 0; col < nx_; ++col) {
      const Point c{window.x0() + (static_cast<double>(col) + 0.5) * pixel_size_km,
                    window.y0() + (static_cast<double>(row) + 0.5) * pixel_size_km};
      if (!window.contains(c)) continue;
      xs_.push_back(c.x);
      ys_.push_back(c.y);
      raster_.push_back(col + nx_ * row);
    }
  }
}

double path_loss(double r_km, const PathLossParams& params) {
  if (r_km < 0.0) throw std::invalid_argument("distance must be non-negative");
  if (r_km == 0.0) return 0.0;
  return std::pow(params.k_per_km * r_km, params.beta);
}

double lognormal_equivalence_moment(double sigma_db, double beta) {
  if (!(beta > 2.0)) throw std::invalid_argument("beta must exceed 2");
  const double t = 2.0 / beta;
  const double s = sigma_db * std::numbers::ln10 / 10.0;
  return std::exp(0.5 * t * t * s * s);
}

namespace {

std::size_t fft_friendly_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

}  // namespace

struct ShadowFieldGenerator::Impl {
  const Grid* grid = nullptr;
  double sigma = 0.0;
  std::size_t mx = 0, my = 0;
  std::vector<double> sqrt_eigen;
  fftw_complex* buffer = nullptr;
  fftw_plan plan = nullptr;
  Rng rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  bool have_spare = false;
  double negative_ratio = 0.0;
  std::vector<std::string> warnings;

  ~Impl() {
    if (plan) fftw_destroy_plan(plan);
    if (buffer) fftw_free(buffer);
  }

  void synthesize() {
    const std::size_t m = mx * my;
    for (std::size_t i = 0; i < m; ++i) {
      buffer[i][0] = sqrt_eigen[i] * normal(rng);
      buffer[i][1] = sqrt_eigen[i] * normal(rng);
    }
    fftw_execute(plan);
  }

  void gather(std::span<double> out, int part) const {
    const std::size_t nx = grid->nx();
    for (std::size_t p = 0; p < grid->size(); ++p) {
      const std::size_t r = grid->raster_index(p);
      const std::size_t col = r % nx;
      const std::size_t row = r / nx;
      out[p] = buffer[row * mx + col][part];
    }
  }
};

ShadowFieldGenerator::ShadowFieldGenerator(const Grid& grid, const ShadowingParams& params,
                                           std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  impl_->grid = &grid;
  impl_->sigma = params.log_sigma();
  impl_->rng = make_rng(seed, stream::shadowing);
  if (grid.pixel_size() > params.corr_dist_km) {
    impl_->warnings.push_back("pixel size exceeds the shadowing correlation distance; "
                              "the field is effectively uncorrelated between pixels");
  }
  if (impl_->sigma == 0.0) return;

  // Minimal embedding: the periodic distance must reproduce every lag that
  // occurs inside the raster.
  impl_->mx = fft_friendly_size(2 * grid.nx());
  impl_->my = fft_friendly_size(2 * grid.ny());
  const std::size_t mx = impl_->mx;
  const std::size_t my = impl_->my;
  const std::size_t m = mx * my;
  impl_->buffer = fftw_alloc_complex(m);
  impl_->plan = fftw_plan_dft_2d(static_cast<int>(my), static_cast<int>(mx), impl_->buffer,
                                 impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);

  const double h = grid.pixel_size();
  const double var = impl_->sigma * impl_->sigma;
  for (std::size_t row = 0; row < my; ++row) {
    const double dy = static_cast<double>(std::min(row, my - row)) * h;
    for (std::size_t col = 0; col < mx; ++col) {
      const double dx = static_cast<double>(std::min(col, mx - col)) * h;
      impl_->buffer[row * mx + col][0] = var * std::exp(-std::hypot(dx, dy) / params.corr_dist_km);
      impl_->buffer[row * mx + col][1] = 0.0;
    }
  }
  fftw_execute(impl_->plan);

  impl_->sqrt_eigen.resize(m);
  double largest = 0.0;
  double most_negative = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ev = impl_->buffer[i][0];
    largest = std::max(largest, ev);
    most_negative = std::min(most_negative, ev);
    impl_->sqrt_eigen[i] = std::sqrt(std::max(ev, 0.0) / static_cast<double>(m));
  }
  impl_->negative_ratio = largest > 0.0 ? -most_negative / largest : 0.0;
  if (impl_->negative_ratio > 1e-6) {
    impl_->warnings.push_back("circulant embedding has negative eigenvalues; clipped to zero");
  }
}

ShadowFieldGenerator::~ShadowFieldGenerator() = default;

void ShadowFieldGenerator::next(std::span<double> log_field) {
  if (log_field.size() != impl_->grid->size()) {
    throw std::invalid_argument("shadowing field buffer does not match the grid");
  }
  if (impl_->sigma == 0.0) {
    std::fill(log_field.begin(), log_field.end(), 0.0);
    return;
  }
  // Real and imaginary parts of one synthesis are independent fields.
  if (impl_->have_spare) {
    impl_->gather(log_field, 1);
    impl_->have_spare = false;
    return;
  }
  impl_->synthesize();
  impl_->gather(log_field, 0);
  impl_->have_spare = true;
}

double ShadowFieldGenerator::negative_eigen_ratio() const { return impl_->negative_ratio; }

const std::vector<std::string>& ShadowFieldGenerator::warnings() const { return impl_->warnings; }

double ShadowingFields::value(std::size_t station, std::size_t pixel) const {
  return std::exp(log_fields.at(station).at(pixel));
}

ShadowingFields sample_shadowing_fields(const BsPattern& pattern, const Grid& grid,
                                        const ShadowingParams& params, std::uint64_t seed) {
  if (!params.enabled) throw std::invalid_argument("shadowing is disabled");
  ShadowFieldGenerator gen(grid, params, seed);
  ShadowingFields fields;
  fields.log_fields.assign(pattern.size(), std::vector<double>(grid.size()));
  for (auto& f : fields.log_fields) gen.next(f);
  fields.warnings = gen.warnings();
  return fields;
}

PropagationMap::PropagationMap(Grid grid, std::vector<Point> stations, std::vector<double> gains,
                               std::uint64_t seed, bool shadowed)
    : grid_(std::move(grid)),
      stations_(std::move(stations)),
      gains_(std::move(gains)),
      seed_(seed),
      shadowed_(shadowed) {
  if (gains_.size() != stations_.size() * grid_.size()) {
    throw std::invalid_argument("gain matrix does not match stations x pixels");
  }
}

PropagationMap build_propagation_map(const BsPattern& pattern, const Grid& grid,
                                     const PathLossParams& path_loss,
                                     const ShadowingParams& shadowing, std::uint64_t seed) {
  path_loss.validate();
  shadowing.validate();
  const std::size_t n_pix = grid.size();
  const std::size_t n_st = pattern.size();
  std::vector<double> gains(n_st * n_pix);

  const bool shadowed = shadowing.enabled && shadowing.sigma_db > 0.0;
  std::unique_ptr<ShadowFieldGenerator> gen;
  std::vector<double> field;
  if (shadowed) {
    gen = std::make_unique<ShadowFieldGenerator>(grid, shadowing, seed);
    field.resize(n_pix);
  }

  const auto& k = simd::active_kernels();
  const double log_scale = -path_loss.beta * std::log(path_loss.k_per_km);
  for (std::size_t s = 0; s < n_st; ++s) {
    if (gen) gen->next(field);
    k.station_gain(pattern.points[s].x, pattern.points[s].y, grid.xs().data(), grid.ys().data(),
                   gen ? field.data() : nullptr, log_scale, 0.5 * path_loss.beta,
                   gains.data() + s * n_pix, n_pix);
  }

  PropagationMap map(grid, pattern.points, std::move(gains), seed, shadowed);
  if (gen) map.warnings = gen->warnings();
  return map;
}

}  // namespace cellqos
