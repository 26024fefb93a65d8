#pragma once

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "scatterbound/far_field_matrix.hpp"
#include "scatterbound/model.hpp"

namespace scatterbound {

struct PlaneWave {
  Point2 direction{1.0, 0.0};
};

/// Free-space point source Phi(. - z) = (i/4) H0(k |. - z|).
struct PointSource {
  Point2 location{};
};

using IncidentKind = std::variant<PlaneWave, PointSource>;

struct IncidentField {
  IncidentKind kind;
  ComplexField2D trace;

  /// Samples the incident wave on the grid. For a point source the node nearest
  /// to z carries the equal-area disk average of Phi instead of a point value.
  static IncidentField make(const WaveContext& ctx, IncidentKind kind,
                            const ComputationalGrid& grid);
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  ComputationalGrid grid;
};

/// Discretization and Krylov parameters shared by all forward solves.
struct ForwardConfig {
  double box_radius = 2.0;
  int grid_points = 256;
  double tolerance = 1e-8;
  int supersample = 8;  // cell-average subsamples per dimension for q on the grid
  int restart = 50;
  int max_iterations = 1000;
  int threads = 0;  // 0: SCATTERBOUND_THREADS or hardware concurrency

  ComputationalGrid grid() const { return {box_radius, grid_points}; }
};

/// Fourier symbol of the fundamental solution truncated at radius R on the
/// periodization lattice of `grid`, scaled by 1/m^2 so that
/// conv(f) = IFFT(symbol .* FFT(f)). Cached per (k, R, m).
std::shared_ptr<const std::vector<cdouble>> truncated_kernel_symbol(const WaveContext& ctx,
                                                                    const ComputationalGrid& grid);

/// Closed form of the symbol before the 1/m^2 scaling, at frequency modulus rho.
cdouble truncated_kernel_transform(double k, double radius, double rho);

/// Solves u = u_i + k^2 V_h(q u) by restarted GMRES. Throws ConvergenceError
/// when the tolerance is not reached and PreconditionError when the support
/// does not fit the grid or tol is outside [1e-12, 1e-4].
std::pair<ComplexField2D, SolveReport> solve_total_field(const WaveContext& ctx,
                                                         const ContrastField& q,
                                                         const IncidentField& inc,
                                                         const ComputationalGrid& grid, double tol,
                                                         const ForwardConfig& config = {});

/// u_inf(xhat_i) = k^2 h^2 sum_j exp(-i k xhat_i . x_j) q_j u_j.
std::vector<cdouble> far_field_vector(const WaveContext& ctx, const ContrastField& q,
                                      const ComplexField2D& u, const DirectionSet& dirs,
                                      int supersample = ForwardConfig{}.supersample);

/// n plane-wave solves, one per incident direction; column j holds theta_j.
FarFieldMatrix far_field_matrix(const WaveContext& ctx, const ContrastField& q,
                                const DirectionSet& dirs, const ForwardConfig& config = {});

/// Far field of the background Green's function G(., z) for contrast q2:
/// exp(-i k xhat . z) plus the far field of the scattered part.
std::vector<cdouble> green_far_field(const WaveContext& ctx, const ContrastField& q2, Point2 z,
                                     const DirectionSet& dirs, const ForwardConfig& config = {});

/// Column c holds green_far_field for source zs[c]; the contrast is sampled once.
Eigen::MatrixXcd green_far_fields(const WaveContext& ctx, const ContrastField& q2,
                                  const std::vector<Point2>& zs, const DirectionSet& dirs,
                                  const ForwardConfig& config = {});

/// Independent reference solver: dense midpoint collocation on a cell-centred
/// coarse_m x coarse_m grid over the support box, singular cell replaced by the
/// exact disk integral of Phi, solved by dense LU.
class DenseOracle {
 public:
  DenseOracle(const WaveContext& ctx, const ContrastField& q, int coarse_m);

  FarFieldMatrix far_field_matrix(const DirectionSet& dirs) const;
  std::vector<cdouble> green_far_field(Point2 z, const DirectionSet& dirs) const;

  std::size_t unknowns() const noexcept { return nodes_.size(); }

 private:
  std::vector<cdouble> far_field_of(const Eigen::VectorXcd& u, const DirectionSet& dirs) const;

  WaveContext ctx_;
  ContrastField q_;
  double h_;
  std::vector<Point2> nodes_;
  std::vector<double> qvals_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

FarFieldMatrix dense_oracle_far_field(const WaveContext& ctx, const ContrastField& q,
                                      const DirectionSet& dirs, int coarse_m);

/// Integral of Phi over the disk of radius a centred at the singularity.
cdouble fundamental_solution_disk_integral(double k, double a);

}  // namespace scatterbound
