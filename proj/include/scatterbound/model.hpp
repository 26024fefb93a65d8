#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace scatterbound {

using cdouble = std::complex<double>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

/// Wavenumber together with the 2D far-field normalization |gamma_2|^2 = 1/(8 pi k).
class WaveContext {
 public:
  explicit WaveContext(double k);

  double k() const noexcept { return k_; }
  double gamma_sq() const noexcept { return gamma_sq_; }

  friend bool operator==(const WaveContext&, const WaveContext&) = default;

 private:
  double k_;
  double gamma_sq_;
};

/// n equidistributed unit vectors (cos 2 pi j/n, sin 2 pi j/n) with
/// trapezoidal weight 2 pi / n. n is even and at least 8.
class DirectionSet {
 public:
  explicit DirectionSet(int n);

  int size() const noexcept { return n_; }
  double weight() const noexcept;
  Point2 direction(int j) const;
  int antipode(int j) const noexcept { return (j + n_ / 2) % n_; }
  const std::vector<Point2>& directions() const noexcept { return dirs_; }

  friend bool operator==(const DirectionSet& a, const DirectionSet& b) { return a.n_ == b.n_; }

 private:
  int n_;
  std::vector<Point2> dirs_;
};

/// Closed axis-aligned rectangle.
struct Box {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;

  bool contains(Point2 p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  double diameter() const noexcept;
  static Box square(double half_width, Point2 center = {});
};

/// Tensor grid of m x m nodes x_j = -R + j h, h = 2R/m, on the periodization
/// box [-R, R]^2. Node (ix, iy) is stored at index iy * m + ix.
class ComputationalGrid {
 public:
  ComputationalGrid(double box_radius, int m);

  double box_radius() const noexcept { return radius_; }
  int points_per_dim() const noexcept { return m_; }
  double spacing() const noexcept { return 2.0 * radius_ / m_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_) * m_; }
  double coordinate(int j) const noexcept { return -radius_ + j * spacing(); }
  Point2 node(std::size_t index) const noexcept;

  // Supports that fit: inside [-R/2, R/2]^2 and with diameter at most R, so
  // the kernel truncated at radius R sees every pair of support points and
  // the periodized convolution never wraps around.
  bool fits(const Box& support) const noexcept;

  friend bool operator==(const ComputationalGrid&, const ComputationalGrid&) = default;

 private:
  double radius_;
  int m_;
};

struct ComplexField2D {
  ComputationalGrid grid;
  std::vector<cdouble> values;

  explicit ComplexField2D(const ComputationalGrid& g) : grid(g), values(g.size()) {}
};

// --- contrast descriptors ---------------------------------------------------

struct ConstantOnSquare {
  double value = 0.0;
  double half_width = 0.7;
  Point2 center{};
};

/// Verbatim printed formula; `symmetric` selects min(x1-0.7, -x1-0.7) for the
/// first inner minimum instead of min(x1-0.7, -x1)-0.7.
struct BuiltinQv {
  bool symmetric = false;
};

struct BuiltinQr {};

/// p(x) = slope * (xhat . (x - anchor)) + offset on the closed square, xhat = anchor/|anchor|.
struct LinearOnSquare {
  Point2 anchor{};
  double slope = 0.0;
  double offset = 0.0;
  double half_width = 0.7;
};

/// 0.7 on [-0.7,0.7]^2 minus 1.2 on [-0.35,0.35]^2.
struct SignChangingDemo {};

/// Bilinear interpolation of samples on a uniform nx x ny grid starting at origin.
struct Tabulated {
  Point2 origin{};
  double spacing = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // row-major, index iy * nx + ix
};

class ContrastField;

struct WeightedContrast {
  double weight = 1.0;
  std::shared_ptr<const ContrastField> contrast;
};

/// Weighted superposition; also used for scaling a single contrast.
struct Sum {
  std::vector<WeightedContrast> terms;
};

using ContrastDescriptor = std::variant<ConstantOnSquare, BuiltinQv, BuiltinQr, LinearOnSquare,
                                        SignChangingDemo, Tabulated, Sum>;

/// Real-valued contrast with compact support. Immutable.
class ContrastField {
 public:
  ContrastField(ContrastDescriptor descriptor);  // NOLINT(google-explicit-constructor)

  const ContrastDescriptor& descriptor() const noexcept { return descriptor_; }
  const Box& support_box() const noexcept { return support_; }

  double evaluate(Point2 p) const;
  std::vector<double> evaluate(std::span<const Point2> points) const;

  /// Average of q over a rectangular cell. Indicator parts use exact overlap
  /// areas; smooth parts use supersample x supersample midpoints on the overlap.
  double cell_average(const Box& cell, int supersample) const;

  /// Cell averages over all grid cells; cells that do not meet the support box
  /// are exactly zero.
  std::vector<double> sample(const ComputationalGrid& grid, int supersample) const;

  /// Short human-readable tag, e.g. "constant_on_square(0.4)".
  std::string tag() const;

  bool is_zero() const;

  friend bool operator==(const ContrastField& a, const ContrastField& b);

 private:
  ContrastDescriptor descriptor_;
  Box support_;
};

// Built-in contrasts on D = [-0.7, 0.7]^2.
inline constexpr double kDefaultHalfWidth = 0.7;

ContrastField constant_on_square(double value, double half_width = kDefaultHalfWidth,
                                 Point2 center = {});
ContrastField builtin_qc();
ContrastField builtin_qv(bool symmetric = false);
ContrastField builtin_qr();
ContrastField sign_changing_demo();
ContrastField linear_on_square(Point2 anchor, double slope, double offset,
                               double half_width = kDefaultHalfWidth);
ContrastField scaled(const ContrastField& q, double factor);
ContrastField sum(const std::vector<std::pair<double, ContrastField>>& terms);

nlohmann::json contrast_to_json(const ContrastField& q);
ContrastField contrast_from_json(const nlohmann::json& j);

}  // namespace scatterbound
