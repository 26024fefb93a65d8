#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scatterbound/far_field_matrix.hpp"
#include "scatterbound/forward.hpp"

namespace scatterbound {

struct AnnulusCounts {
  double r_min = 1e-8;
  double r_max = 1e-2;
  int m_plus = 0;
  int m_minus = 0;
};

/// Eigenvalues of `a` with r_min <= |lambda| <= r_max, split by the sign of
/// Re lambda. Re lambda == 0 counts to neither side.
AnnulusCounts annulus_counts(const Eigen::MatrixXcd& a, double r_min = 1e-8, double r_max = 1e-2);

/// Which annulus count vanishes when the test contrast lies below q on the boundary.
enum class Orientation { PlusVanishesBelow, MinusVanishesBelow };

enum class Verdict { TestBelow, TestAbove, Indistinguishable, Indeterminate };

std::string to_string(Orientation o);
std::string to_string(Verdict v);
Orientation orientation_from_string(const std::string& s);
Verdict verdict_from_string(const std::string& s);

Verdict bound_verdict(const AnnulusCounts& counts, Orientation orientation);

/// Counts for S_test^H (F_q - F_test).
AnnulusCounts compare_counts(const FarFieldMatrix& f_q, const FarFieldMatrix& f_test,
                             double r_min = 1e-8, double r_max = 1e-2);

/// Orientation from precomputed reference and probe data. Throws NumericalError
/// "calibration indeterminate - adjust annulus or grid" unless exactly one count vanishes.
Orientation calibrate_orientation(const FarFieldMatrix& f_ref, double boundary_value,
                                  const FarFieldMatrix& f_probe, double probe_c,
                                  double r_min = 1e-8, double r_max = 1e-2);

/// Synthesizes the reference far field and the constant probe probe_c on the
/// reference's support square, then calibrates.
Orientation calibrate_orientation(const WaveContext& ctx, const DirectionSet& dirs,
                                  const ForwardConfig& config, const ContrastField& reference_q,
                                  double boundary_value, double probe_c, double r_min = 1e-8,
                                  double r_max = 1e-2);

struct TrailEntry {
  double c = 0.0;
  AnnulusCounts counts;
  Verdict verdict = Verdict::Indeterminate;
};

struct BoundsResult {
  double c_star = 0.0;
  double c_upper = 0.0;
  std::vector<TrailEntry> trail;
  std::vector<std::string> warnings;
  Orientation orientation = Orientation::PlusVanishesBelow;
  double r_min = 1e-8;
  double r_max = 1e-2;
};

/// Far field matrices of c * 1_D for a uniform grid of c values.
using ConstantBank = std::vector<std::pair<double, FarFieldMatrix>>;

std::vector<double> uniform_values(double first, double last, double step);

ConstantBank synthesize_constant_bank(const WaveContext& ctx, const DirectionSet& dirs,
                                      const ForwardConfig& config, const std::vector<double>& values,
                                      double half_width = kDefaultHalfWidth);

/// Raise c_star while the test lies below q, lower c_upper while it lies above;
/// an Indistinguishable verdict stops a loop at that c. Leaving the bank range
/// stops a loop at the last available value and records a warning.
BoundsResult constant_bound_search(const FarFieldMatrix& f_q, const ConstantBank& bank, double step,
                                   double c_lo, double c_hi, Orientation orientation,
                                   double r_min = 1e-8, double r_max = 1e-2);

struct LinearContrast {
  Point2 anchor{};
  double slope = 0.0;
  double offset = 0.0;
  double half_width = kDefaultHalfWidth;

  double evaluate(Point2 x) const;
  ContrastField contrast() const;
};

/// n points equidistributed by arclength on the boundary of [-a, a]^2, counter-
/// clockwise from (a, 0).
std::vector<Point2> boundary_anchor_points(int n_points, double half_width = kDefaultHalfWidth);

std::vector<double> default_slopes();   // eleven values -2, -1.6, ..., 2
std::vector<double> default_offsets();  // 0, 0.1, ..., 1

/// Cross product anchors x slopes x offsets, anchors outermost.
std::vector<LinearContrast> linear_test_family(int n_points, const std::vector<double>& slopes,
                                               const std::vector<double>& offsets,
                                               double half_width = kDefaultHalfWidth);
std::vector<LinearContrast> linear_test_family();

using LinearBank = std::vector<std::pair<LinearContrast, FarFieldMatrix>>;

LinearBank synthesize_linear_bank(const WaveContext& ctx, const DirectionSet& dirs,
                                  const ForwardConfig& config,
                                  const std::vector<LinearContrast>& family);

struct TraceSample {
  double s = 0.0;  // arclength from (-a, -a), counterclockwise
  Point2 point{};
  double value = 0.0;
};

/// Samples per edge with shared corners: 4 * n_per_edge points starting at (-a, -a).
std::vector<std::pair<double, Point2>> boundary_samples(const Box& square, int n_per_edge);

/// Interior trace of q: evaluation 1e-6 inside the square along the inward normal.
std::vector<TraceSample> boundary_trace(const ContrastField& q, int n_per_edge);

struct TraceBounds {
  std::vector<double> s;
  std::vector<Point2> points;
  std::vector<double> q_minus;
  std::vector<double> q_plus;
  std::vector<int> minus_contributor;  // bank index attaining q_minus, -1 for the initial value
  std::vector<int> plus_contributor;
  std::vector<std::pair<int, Verdict>> skipped;
  int accepted_below = 0;
  int accepted_above = 0;
  Orientation orientation = Orientation::PlusVanishesBelow;
  double r_min = 1e-8;
  double r_max = 1e-2;
};

TraceBounds linear_refinement(const FarFieldMatrix& f_q, const LinearBank& bank,
                              Orientation orientation, double init_magnitude = 1e3,
                              int samples_per_edge = 64, double r_min = 1e-8, double r_max = 1e-2,
                              int threads = 0);

}  // namespace scatterbound
