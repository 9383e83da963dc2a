#include "cellqos/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cellqos/csv.hpp"
#include "cellqos/random.hpp"

namespace cellqos {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Window Window::disc(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("disc window needs a positive radius");
  }
  Window w;
  w.kind_ = Kind::disc;
  w.cx_ = center.x;
  w.cy_ = center.y;
  w.radius_ = radius;
  w.x0_ = center.x - radius;
  w.y0_ = center.y - radius;
  w.x1_ = center.x + radius;
  w.y1_ = center.y + radius;
  return w;
}

Window Window::rectangle(double x0, double y0, double x1, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) {
    throw std::invalid_argument("rectangle window needs x1 > x0 and y1 > y0");
  }
  Window w;
  w.kind_ = Kind::rectangle;
  w.x0_ = x0;
  w.y0_ = y0;
  w.x1_ = x1;
  w.y1_ = y1;
  w.cx_ = 0.5 * (x0 + x1);
  w.cy_ = 0.5 * (y0 + y1);
  return w;
}

Point Window::center() const { return {cx_, cy_}; }

double Window::area() const {
  if (kind_ == Kind::disc) return std::numbers::pi * radius_ * radius_;
  return (x1_ - x0_) * (y1_ - y0_);
}

double Window::diameter() const {
  if (kind_ == Kind::disc) return 2.0 * radius_;
  return std::hypot(x1_ - x0_, y1_ - y0_);
}

bool Window::contains(Point p) const {
  if (kind_ == Kind::disc) {
    const double dx = p.x - cx_;
    const double dy = p.y - cy_;
    return dx * dx + dy * dy <= radius_ * radius_;
  }
  return p.x >= x0_ && p.x <= x1_ && p.y >= y0_ && p.y <= y1_;
}

double Window::distance_to_boundary(Point p) const {
  if (kind_ == Kind::disc) return std::max(0.0, radius_ - std::hypot(p.x - cx_, p.y - cy_));
  return std::max(0.0, std::min({p.x - x0_, x1_ - p.x, p.y - y0_, y1_ - p.y}));
}

double Window::translated_overlap(double dx, double dy) const {
  if (kind_ == Kind::disc) {
    const double d = std::hypot(dx, dy);
    if (d >= 2.0 * radius_) return 0.0;
    const double r2 = radius_ * radius_;
    return 2.0 * r2 * std::acos(d / (2.0 * radius_)) - 0.5 * d * std::sqrt(4.0 * r2 - d * d);
  }
  const double w = (x1_ - x0_) - std::abs(dx);
  const double h = (y1_ - y0_) - std::abs(dy);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

BsPattern sample_poisson(double intensity, const Window& window, std::uint64_t seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("Poisson intensity must be positive");
  }
  Rng rng = make_rng(seed, stream::pattern);
  std::poisson_distribution<long long> count(intensity * window.area());
  const long long n = count(rng);

  BsPattern pattern;
  pattern.intensity = intensity;
  pattern.window = window;
  pattern.seed = seed;
  pattern.points.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Point c = window.center();
  for (long long i = 0; i < n; ++i) {
    if (window.kind() == Window::Kind::disc) {
      const double r = window.radius() * std::sqrt(unit(rng));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      pattern.points.push_back({c.x + r * std::cos(phi), c.y + r * std::sin(phi)});
    } else {
      const double x = window.x0() + (window.x1() - window.x0()) * unit(rng);
      const double y = window.y0() + (window.y1() - window.y0()) * unit(rng);
      pattern.points.push_back({x, y});
    }
  }
  return pattern;
}

double hexagonal_pitch(double intensity) {
  if (!(intensity > 0.0)) throw std::invalid_argument("lattice intensity must be positive");
  return std::sqrt(2.0 / (intensity * std::sqrt(3.0)));
}

BsPattern hexagonal_lattice(double intensity, const Window& window) {
  const double a = hexagonal_pitch(intensity);
  const double row = a * std::sqrt(3.0) / 2.0;
  const Point c = window.center();
  const double half_w = 0.5 * (window.x1() - window.x0());
  const double half_h = 0.5 * (window.y1() - window.y0());
  const long jmax = static_cast<long>(std::ceil(half_h / row)) + 1;
  const long imax = static_cast<long>(std::ceil(half_w / a)) + jmax + 1;

  BsPattern pattern;
  pattern.intensity = intensity;
  pattern.window = window;
  for (long j = -jmax; j <= jmax; ++j) {
    for (long i = -imax; i <= imax; ++i) {
      const Point p{c.x + a * (static_cast<double>(i) + 0.5 * static_cast<double>(j)),
                    c.y + row * static_cast<double>(j)};
      if (window.contains(p)) pattern.points.push_back(p);
    }
  }
  return pattern;
}

LCurve ripley_l(const BsPattern& pattern, std::span<const double> radii) {
  const std::size_t n = pattern.size();
  if (n < 2) throw std::invalid_argument("Ripley L needs at least two points");
  const double r_valid = 0.5 * pattern.window.diameter();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0)) throw std::invalid_argument("Ripley L radii must be positive");
    if (radii[k] > r_valid) {
      throw std::invalid_argument("Ripley L radius exceeds half the window diameter");
    }
    if (k > 0 && !(radii[k] > radii[k - 1])) {
      throw std::invalid_argument("Ripley L radii must be strictly increasing");
    }
  }

  // Each ordered pair contributes 1/|W cap W_h| to every radius >= its distance.
  std::vector<double> increments(radii.size(), 0.0);
  const double r_max = radii.empty() ? 0.0 : radii.back();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = pattern.points[j].x - pattern.points[i].x;
      const double dy = pattern.points[j].y - pattern.points[i].y;
      const double d = std::hypot(dx, dy);
      if (d > r_max) continue;
      const auto it = std::lower_bound(radii.begin(), radii.end(), d);
      const double overlap = pattern.window.translated_overlap(dx, dy);
      increments[static_cast<std::size_t>(it - radii.begin())] += 2.0 / overlap;
    }
  }

  const double area = pattern.window.area();
  const double scale = area * area / (static_cast<double>(n) * static_cast<double>(n - 1));
  LCurve curve;
  curve.radii.assign(radii.begin(), radii.end());
  curve.n_points = n;
  curve.l_values.resize(radii.size());
  double cumulative = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    cumulative += increments[k];
    curve.l_values[k] = std::sqrt(scale * cumulative / std::numbers::pi);
  }
  return curve;
}

namespace {

double max_deviation(const LCurve& c) {
  double m = 0.0;
  for (std::size_t k = 0; k < c.radii.size(); ++k) {
    m = std::max(m, std::abs(c.l_values[k] - c.radii[k]));
  }
  return m;
}

}  // namespace

EnvelopeTest poisson_envelope_test(const BsPattern& pattern, std::span<const double> radii,
                                   int n_simulations, std::uint64_t seed) {
  if (n_simulations < 1) throw std::invalid_argument("envelope needs at least one simulation");
  EnvelopeTest test;
  test.observed = ripley_l(pattern, radii);
  test.observed_deviation = max_deviation(test.observed);
  test.matched_intensity = static_cast<double>(pattern.size()) / pattern.window.area();
  test.pointwise_lower.assign(radii.size(), std::numeric_limits<double>::infinity());
  test.pointwise_upper.assign(radii.size(), 0.0);

  std::uint64_t attempt = 0;
  while (test.simulated_deviations.size() < static_cast<std::size_t>(n_simulations)) {
    const BsPattern sim = sample_poisson(test.matched_intensity, pattern.window,
                                         derive_seed(seed, stream::envelope, attempt++));
    if (sim.size() < 2) continue;
    const LCurve c = ripley_l(sim, radii);
    for (std::size_t k = 0; k < radii.size(); ++k) {
      test.pointwise_lower[k] = std::min(test.pointwise_lower[k], c.l_values[k]);
      test.pointwise_upper[k] = std::max(test.pointwise_upper[k], c.l_values[k]);
    }
    test.simulated_deviations.push_back(max_deviation(c));
  }
  test.critical_deviation =
      *std::max_element(test.simulated_deviations.begin(), test.simulated_deviations.end());
  const auto exceed = std::count_if(test.simulated_deviations.begin(), test.simulated_deviations.end(),
                                    [&](double d) { return d >= test.observed_deviation; });
  test.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + n_simulations);
  test.inside = test.observed_deviation <= test.critical_deviation;
  return test;
}

std::vector<double> default_l_radii(const Window& window, std::size_t count) {
  const double r_max = 0.25 * window.diameter();
  std::vector<double> radii(count);
  for (std::size_t k = 0; k < count; ++k) {
    radii[k] = r_max * static_cast<double>(k + 1) / static_cast<double>(count);
  }
  return radii;
}

void write_pattern_csv(std::ostream& out, const BsPattern& pattern) {
  out << "# units: x_km,y_km in km\n";
  out << "x_km,y_km\n";
  for (const Point& p : pattern.points) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

std::vector<Point> read_points_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  const std::size_t ix = table.column("x_km");
  const std::size_t iy = table.column("y_km");
  std::vector<Point> points;
  points.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    points.push_back({table.number(r, ix), table.number(r, iy)});
  }
  return points;
}

}  // namespace cellqos
