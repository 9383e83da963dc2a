#pragma once

// Base-station point patterns in a bounded observation window. Coordinates
// are in km, intensities in stations per km^2.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cellqos {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(Point a, Point b);

class Window {
 public:
  enum class Kind { disc, rectangle };

  static Window disc(Point center, double radius);
  static Window rectangle(double x0, double y0, double x1, double y1);

  Kind kind() const { return kind_; }
  Point center() const;
  double radius() const { return radius_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double x1() const { return x1_; }
  double y1() const { return y1_; }

  double area() const;
  double diameter() const;
  bool contains(Point p) const;

  // Euclidean distance from an inside point to the boundary.
  double distance_to_boundary(Point p) const;

  // |W intersected with W translated by (dx, dy)|, the translation edge
  // correction denominator.
  double translated_overlap(double dx, double dy) const;

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window() = default;

  Kind kind_ = Kind::rectangle;
  // Bounding box; for a disc also the center and radius.
  double x0_ = 0, y0_ = 0, x1_ = 0, y1_ = 0;
  double cx_ = 0, cy_ = 0, radius_ = 0;
};

struct BsPattern {
  std::vector<Point> points;
  double intensity = 0.0;  // nominal, stations per km^2
  Window window = Window::rectangle(0, 0, 1, 1);
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
};

struct LCurve {
  std::vector<double> radii;
  std::vector<double> l_values;
  std::size_t n_points = 0;
};

// Homogeneous Poisson process restricted to the window.
BsPattern sample_poisson(double intensity, const Window& window, std::uint64_t seed);

// Lattice pitch giving one point per area 1/intensity.
double hexagonal_pitch(double intensity);

// Triangular lattice anchored at the window center, zero rotation.
BsPattern hexagonal_lattice(double intensity, const Window& window);

// L(r) = sqrt(K(r)/pi) with translation edge correction.
LCurve ripley_l(const BsPattern& pattern, std::span<const double> radii);

// Global envelope test built on the statistic max_r |L(r) - r|. The
// observed pattern is inside when its statistic does not exceed the largest
// one among the simulations.
struct EnvelopeTest {
  LCurve observed;
  std::vector<double> pointwise_lower;
  std::vector<double> pointwise_upper;
  double observed_deviation = 0.0;
  double critical_deviation = 0.0;  // max over simulations
  std::vector<double> simulated_deviations;
  double matched_intensity = 0.0;
  double p_value = 0.0;  // rank-based, (1 + #sim >= obs) / (1 + n_sim)
  bool inside = false;
};

EnvelopeTest poisson_envelope_test(const BsPattern& pattern,
                                   std::span<const double> radii,
                                   int n_simulations, std::uint64_t seed);

// Evenly spaced radii in (0, max_radius].
std::vector<double> default_l_radii(const Window& window, std::size_t count = 50);

// CSV with header `x_km,y_km`.
void write_pattern_csv(std::ostream& out, const BsPattern& pattern);
std::vector<Point> read_points_csv(std::istream& in);

}  // namespace cellqos
