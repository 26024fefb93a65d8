#include "scatterbound/forward.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <unordered_map>

#include "scatterbound/errors.hpp"
#include "scatterbound/gmres.hpp"
#include "scatterbound/parallel.hpp"
#include "scatterbound/specfun.hpp"

namespace scatterbound {

namespace {

constexpr cdouble kI{0.0, 1.0};

cdouble fundamental_solution(double k, double r) {
  return 0.25 * kI * specfun::hankel1(specfun::CylOrder(0), k * r);
}

// --- FFTW plumbing -------------------------------------------------------------

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<cdouble[], FftwFree>;

FftwBuffer make_buffer(std::size_t n) {
  auto* p = static_cast<cdouble*>(fftw_malloc(sizeof(cdouble) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

// One pair of in-place plans per grid size; plans are executed on caller buffers
// through the new-array interface, which is thread-safe.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const PlanPair& plans_for(int m) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(fftw_planner_mutex());
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  auto buf = make_buffer(static_cast<std::size_t>(m) * m);
  auto* data = reinterpret_cast<fftw_complex*>(buf.get());
  PlanPair p;
  p.forward = fftw_plan_dft_2d(m, m, data, data, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_2d(m, m, data, data, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(m, p).first->second;
}

// --- discrete Lippmann-Schwinger operator ---------------------------------------

class LippmannSchwinger {
 public:
  LippmannSchwinger(const WaveContext& ctx, const ComputationalGrid& grid,
                    std::vector<double> qgrid)
      : k2_(ctx.k() * ctx.k()),
        grid_(grid),
        symbol_(truncated_kernel_symbol(ctx, grid)),
        plans_(plans_for(grid.points_per_dim())),
        buffer_(make_buffer(grid.size())) {
    for (std::size_t i = 0; i < qgrid.size(); ++i) {
      if (qgrid[i] != 0.0) {
        active_.push_back(i);
        qactive_.push_back(qgrid[i]);
      }
    }
  }

  const std::vector<std::size_t>& active() const { return active_; }
  const std::vector<double>& q_active() const { return qactive_; }

  // buffer <- V_h(q v) on the full grid, v given on the active nodes
  void convolve(const std::vector<cdouble>& v) const {
    cdouble* b = buffer_.get();
    std::fill(b, b + grid_.size(), cdouble{});
    for (std::size_t i = 0; i < active_.size(); ++i) b[active_[i]] = qactive_[i] * v[i];
    auto* data = reinterpret_cast<fftw_complex*>(b);
    fftw_execute_dft(plans_.forward, data, data);
    const auto& s = *symbol_;
    for (std::size_t i = 0; i < grid_.size(); ++i) b[i] *= s[i];
    fftw_execute_dft(plans_.backward, data, data);
  }

  void apply(const std::vector<cdouble>& v, std::vector<cdouble>& out) const {
    convolve(v);
    out.resize(v.size());
    const cdouble* b = buffer_.get();
    for (std::size_t i = 0; i < active_.size(); ++i) out[i] = v[i] - k2_ * b[active_[i]];
  }

  const cdouble* buffer() const { return buffer_.get(); }
  double k2() const { return k2_; }

 private:
  double k2_;
  ComputationalGrid grid_;
  std::shared_ptr<const std::vector<cdouble>> symbol_;
  const PlanPair& plans_;
  FftwBuffer buffer_;
  std::vector<std::size_t> active_;
  std::vector<double> qactive_;
};

void check_tolerance(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) {
    throw PreconditionError("solver tolerance must lie in [1e-12, 1e-4]");
  }
}

void check_fits(const ContrastField& q, const ComputationalGrid& grid) {
  if (!grid.fits(q.support_box())) {
    throw PreconditionError(
        "contrast support does not fit the computational grid (periodization would wrap "
        "around): support must lie in [-R/2, R/2]^2 with diameter at most R");
  }
}

struct SolveOutput {
  ComplexField2D u;
  SolveReport report;
};

SolveOutput solve_with(const LippmannSchwinger& op, const IncidentField& inc,
                       const ComputationalGrid& grid, const ForwardConfig& cfg, double tol) {
  SolveOutput out{inc.trace, SolveReport{0, 0.0, grid}};
  const auto& active = op.active();
  if (active.empty()) return out;

  std::vector<cdouble> b(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) b[i] = inc.trace.values[active[i]];
  std::vector<cdouble> x = b;
  GmresOptions opts{cfg.restart, cfg.max_iterations, tol};
  const auto res = gmres([&](const auto& v, auto& w) { op.apply(v, w); }, b, x, opts);
  out.report.iterations = res.iterations;
  out.report.relative_residual = res.relative_residual;
  if (!res.converged) {
    throw ConvergenceError("Lippmann-Schwinger solve did not converge: relative residual " +
                               std::to_string(res.relative_residual) + " after " +
                               std::to_string(res.iterations) + " iterations",
                           res.relative_residual, res.iterations);
  }
  op.convolve(x);
  const cdouble* conv = op.buffer();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.u.values[i] = inc.trace.values[i] + op.k2() * conv[i];
  }
  for (std::size_t i = 0; i < active.size(); ++i) out.u.values[active[i]] = x[i];
  return out;
}

std::vector<cdouble> far_field_from_samples(const WaveContext& ctx, const std::vector<double>& qgrid,
                                            const ComplexField2D& u, const DirectionSet& dirs) {
  const auto& grid = u.grid;
  const double h = grid.spacing();
  const double k = ctx.k();
  std::vector<cdouble> out(dirs.size());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < qgrid.size(); ++i) {
    if (qgrid[i] != 0.0) idx.push_back(i);
  }
  for (int d = 0; d < dirs.size(); ++d) {
    const Point2 xhat = dirs.direction(d);
    cdouble acc{};
    for (std::size_t i : idx) {
      const double phase = -k * dot(xhat, grid.node(i));
      acc += cdouble(std::cos(phase), std::sin(phase)) * (qgrid[i] * u.values[i]);
    }
    out[d] = k * k * h * h * acc;
  }
  return out;
}

}  // namespace

// --- kernel symbol ---------------------------------------------------------------

cdouble fundamental_solution_disk_integral(double k, double a) {
  // int_{|x|<a} (i/4) H0(k|x|) dx = (i pi a / (2k)) H1(ka) - 1/k^2
  return kI * std::numbers::pi * a / (2.0 * k) * specfun::hankel1(specfun::CylOrder(1), k * a) -
         1.0 / (k * k);
}

cdouble truncated_kernel_transform(double k, double radius, double rho) {
  using specfun::CylOrder;
  const cdouble h0 = specfun::hankel1(CylOrder(0), k * radius);
  const cdouble h1 = specfun::hankel1(CylOrder(1), k * radius);
  const double denom = rho * rho - k * k;
  if (std::fabs(rho - k) <= 1e-7 * k) {
    // removable singularity at rho = k
    const double j0 = specfun::bessel_j0(k * radius);
    const double j1 = specfun::bessel_j1(k * radius);
    return kI * std::numbers::pi * radius * radius / 4.0 * (h0 * j0 + h1 * j1);
  }
  const double j0 = specfun::bessel_j0(rho * radius);
  const double j1 = specfun::bessel_j1(rho * radius);
  const cdouble num =
      1.0 + kI * std::numbers::pi * radius / 2.0 * (rho * h0 * j1 - k * h1 * j0);
  return num / denom;
}

std::shared_ptr<const std::vector<cdouble>> truncated_kernel_symbol(const WaveContext& ctx,
                                                                    const ComputationalGrid& grid) {
  using Key = std::tuple<double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<cdouble>>> cache;
  const Key key{ctx.k(), grid.box_radius(), grid.points_per_dim()};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const int m = grid.points_per_dim();
  const double radius = grid.box_radius();
  const double dxi = std::numbers::pi / radius;  // lattice spacing 2 pi / (2R)
  const double scale = 1.0 / (static_cast<double>(m) * m);
  std::unordered_map<long, cdouble> by_norm;
  auto symbol = std::make_shared<std::vector<cdouble>>(grid.size());
  for (int i2 = 0; i2 < m; ++i2) {
    const long n2 = i2 < m / 2 ? i2 : i2 - m;
    for (int i1 = 0; i1 < m; ++i1) {
      const long n1 = i1 < m / 2 ? i1 : i1 - m;
      const long nn = n1 * n1 + n2 * n2;
      auto it = by_norm.find(nn);
      if (it == by_norm.end()) {
        const double rho = dxi * std::sqrt(static_cast<double>(nn));
        it = by_norm.emplace(nn, truncated_kernel_transform(ctx.k(), radius, rho)).first;
      }
      (*symbol)[static_cast<std::size_t>(i2) * m + i1] = scale * it->second;
    }
  }
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(symbol)).first->second;
}

// --- incident fields ---------------------------------------------------------------

IncidentField IncidentField::make(const WaveContext& ctx, IncidentKind kind,
                                  const ComputationalGrid& grid) {
  ComplexField2D trace(grid);
  const double k = ctx.k();
  if (const auto* pw = std::get_if<PlaneWave>(&kind)) {
    const double norm = std::hypot(pw->direction.x, pw->direction.y);
    if (std::fabs(norm - 1.0) > 1e-12) {
      throw PreconditionError("plane wave direction must be a unit vector");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double phase = k * dot(grid.node(i), pw->direction);
      trace.values[i] = {std::cos(phase), std::sin(phase)};
    }
  } else {
    const Point2 z = std::get<PointSource>(kind).location;
    const double r = grid.box_radius();
    if (!(std::fabs(z.x) <= r && std::fabs(z.y) <= r)) {
      throw PreconditionError("point source must lie inside the grid box");
    }
    const double h = grid.spacing();
    const int m = grid.points_per_dim();
    const int jx = std::clamp(static_cast<int>(std::lround((z.x + r) / h)), 0, m - 1);
    const int jy = std::clamp(static_cast<int>(std::lround((z.y + r) / h)), 0, m - 1);
    const std::size_t nearest = static_cast<std::size_t>(jy) * m + jx;
    const cdouble disk_average =
        fundamental_solution_disk_integral(k, h / std::sqrt(std::numbers::pi)) / (h * h);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (i == nearest) {
        trace.values[i] = disk_average;
        continue;
      }
      const Point2 x = grid.node(i);
      trace.values[i] = fundamental_solution(k, std::hypot(x.x - z.x, x.y - z.y));
    }
  }
  return IncidentField{std::move(kind), std::move(trace)};
}

// --- public solves -----------------------------------------------------------------

std::pair<ComplexField2D, SolveReport> solve_total_field(const WaveContext& ctx,
                                                         const ContrastField& q,
                                                         const IncidentField& inc,
                                                         const ComputationalGrid& grid, double tol,
                                                         const ForwardConfig& config) {
  check_tolerance(tol);
  check_fits(q, grid);
  if (!(inc.trace.grid == grid)) throw PreconditionError("incident field sampled on another grid");
  LippmannSchwinger op(ctx, grid, q.sample(grid, config.supersample));
  auto out = solve_with(op, inc, grid, config, tol);
  return {std::move(out.u), out.report};
}

std::vector<cdouble> far_field_vector(const WaveContext& ctx, const ContrastField& q,
                                      const ComplexField2D& u, const DirectionSet& dirs,
                                      int supersample) {
  return far_field_from_samples(ctx, q.sample(u.grid, supersample), u, dirs);
}

FarFieldMatrix far_field_matrix(const WaveContext& ctx, const ContrastField& q,
                                const DirectionSet& dirs, const ForwardConfig& config) {
  const auto grid = config.grid();
  check_tolerance(config.tolerance);
  check_fits(q, grid);
  const int n = dirs.size();
  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Zero(n, n);
  const auto qgrid = q.sample(grid, config.supersample);
  if (std::all_of(qgrid.begin(), qgrid.end(), [](double v) { return v == 0.0; })) {
    return FarFieldMatrix(ctx, dirs, std::move(kernel), q);
  }
  const int threads = resolve_thread_count(config.threads);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t j) {
    LippmannSchwinger op(ctx, grid, qgrid);
    const auto inc = IncidentField::make(ctx, PlaneWave{dirs.direction(static_cast<int>(j))}, grid);
    SolveOutput sol{inc.trace, SolveReport{0, 0.0, grid}};
    try {
      sol = solve_with(op, inc, grid, config, config.tolerance);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("far field column " + std::to_string(j) + ": " + e.what(),
                             e.residual(), e.iterations());
    }
    const auto col = far_field_from_samples(ctx, qgrid, sol.u, dirs);
    for (int i = 0; i < n; ++i) kernel(i, static_cast<Eigen::Index>(j)) = col[i];
  });
  return FarFieldMatrix(ctx, dirs, std::move(kernel), q);
}

namespace {

void check_in_box(Point2 z, const ComputationalGrid& grid) {
  const double r = grid.box_radius();
  if (!(std::fabs(z.x) < r && std::fabs(z.y) < r)) {
    throw PreconditionError("green_far_field: source point outside the grid box");
  }
}

}  // namespace

std::vector<cdouble> green_far_field(const WaveContext& ctx, const ContrastField& q2, Point2 z,
                                     const DirectionSet& dirs, const ForwardConfig& config) {
  const auto m = green_far_fields(ctx, q2, {z}, dirs, config);
  return {m.data(), m.data() + m.rows()};
}

Eigen::MatrixXcd green_far_fields(const WaveContext& ctx, const ContrastField& q2,
                                  const std::vector<Point2>& zs, const DirectionSet& dirs,
                                  const ForwardConfig& config) {
  const auto grid = config.grid();
  const double k = ctx.k();
  const int n = dirs.size();
  Eigen::MatrixXcd out(n, static_cast<Eigen::Index>(zs.size()));
  for (std::size_t c = 0; c < zs.size(); ++c) {
    check_in_box(zs[c], grid);
    for (int i = 0; i < n; ++i) {
      const double phase = -k * dot(dirs.direction(i), zs[c]);
      out(i, static_cast<Eigen::Index>(c)) = {std::cos(phase), std::sin(phase)};
    }
  }
  if (q2.is_zero() || zs.empty()) return out;
  check_tolerance(config.tolerance);
  check_fits(q2, grid);
  const auto qgrid = q2.sample(grid, config.supersample);
  parallel_for(zs.size(), resolve_thread_count(config.threads), [&](std::size_t c) {
    const LippmannSchwinger op(ctx, grid, qgrid);
    const auto inc = IncidentField::make(ctx, PointSource{zs[c]}, grid);
    const auto sol = solve_with(op, inc, grid, config, config.tolerance);
    const auto scattered = far_field_from_samples(ctx, qgrid, sol.u, dirs);
    for (int i = 0; i < n; ++i) out(i, static_cast<Eigen::Index>(c)) += scattered[i];
  });
  return out;
}

// --- dense oracle ------------------------------------------------------------------

DenseOracle::DenseOracle(const WaveContext& ctx, const ContrastField& q, int coarse_m)
    : ctx_(ctx), q_(q), h_(0.0) {
  if (coarse_m < 2 || coarse_m > 64) {
    throw PreconditionError("dense oracle: coarse grid size must be in [2, 64]");
  }
  const Box box = q.support_box();
  const double width = std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  if (!(width > 0)) throw PreconditionError("dense oracle: empty support");
  h_ = width / coarse_m;
  const int sub = 8;
  for (int iy = 0; iy < coarse_m; ++iy) {
    for (int ix = 0; ix < coarse_m; ++ix) {
      const Point2 c{box.xmin + (ix + 0.5) * h_, box.ymin + (iy + 0.5) * h_};
      double acc = 0.0;
      for (int sy = 0; sy < sub; ++sy) {
        for (int sx = 0; sx < sub; ++sx) {
          acc += q.evaluate({c.x - h_ / 2 + (sx + 0.5) * h_ / sub,
                             c.y - h_ / 2 + (sy + 0.5) * h_ / sub});
        }
      }
      nodes_.push_back(c);
      qvals_.push_back(acc / (sub * sub));
    }
  }
  const auto n = static_cast<Eigen::Index>(nodes_.size());
  const double k = ctx.k();
  // Toeplitz structure: the kernel depends only on the index offset.
  std::vector<cdouble> table(static_cast<std::size_t>(coarse_m) * coarse_m);
  for (int dy = 0; dy < coarse_m; ++dy) {
    for (int dx = 0; dx < coarse_m; ++dx) {
      table[static_cast<std::size_t>(dy) * coarse_m + dx] =
          (dx == 0 && dy == 0)
              ? fundamental_solution_disk_integral(k, h_ / std::sqrt(std::numbers::pi))
              : h_ * h_ * fundamental_solution(k, h_ * std::hypot(dx, dy));
    }
  }
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    const int cx = static_cast<int>(col % coarse_m), cy = static_cast<int>(col / coarse_m);
    for (Eigen::Index row = 0; row < n; ++row) {
      const int rx = static_cast<int>(row % coarse_m), ry = static_cast<int>(row / coarse_m);
      const cdouble kern =
          table[static_cast<std::size_t>(std::abs(ry - cy)) * coarse_m + std::abs(rx - cx)];
      a(row, col) = (row == col ? 1.0 : 0.0) - k * k * kern * qvals_[col];
    }
  }
  lu_.compute(a);
  const double rcond = lu_.rcond();
  if (!(rcond > 1e-14)) throw NumericalError("dense oracle: singular collocation system");
}

std::vector<cdouble> DenseOracle::far_field_of(const Eigen::VectorXcd& u,
                                               const DirectionSet& dirs) const {
  const double k = ctx_.k();
  std::vector<cdouble> out(dirs.size());
  for (int d = 0; d < dirs.size(); ++d) {
    const Point2 xhat = dirs.direction(d);
    cdouble acc{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double phase = -k * dot(xhat, nodes_[i]);
      acc += cdouble(std::cos(phase), std::sin(phase)) * qvals_[i] *
             u(static_cast<Eigen::Index>(i));
    }
    out[d] = k * k * h_ * h_ * acc;
  }
  return out;
}

FarFieldMatrix DenseOracle::far_field_matrix(const DirectionSet& dirs) const {
  const int n = dirs.size();
  const auto nn = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXcd rhs(nn, n);
  for (int j = 0; j < n; ++j) {
    const Point2 theta = dirs.direction(j);
    for (Eigen::Index i = 0; i < nn; ++i) {
      const double phase = ctx_.k() * dot(nodes_[static_cast<std::size_t>(i)], theta);
      rhs(i, j) = {std::cos(phase), std::sin(phase)};
    }
  }
  const Eigen::MatrixXcd u = lu_.solve(rhs);
  Eigen::MatrixXcd kernel(n, n);
  for (int j = 0; j < n; ++j) {
    const auto col = far_field_of(u.col(j), dirs);
    for (int i = 0; i < n; ++i) kernel(i, j) = col[i];
  }
  return FarFieldMatrix(ctx_, dirs, std::move(kernel), q_);
}

std::vector<cdouble> DenseOracle::green_far_field(Point2 z, const DirectionSet& dirs) const {
  const double k = ctx_.k();
  const auto nn = static_cast<Eigen::Index>(nodes_.size());
  Eigen::VectorXcd rhs(nn);
  const double a = h_ / std::sqrt(std::numbers::pi);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const Point2 x = nodes_[static_cast<std::size_t>(i)];
    const double r = std::hypot(x.x - z.x, x.y - z.y);
    rhs(i) = r < h_ / 2 ? fundamental_solution_disk_integral(k, a) / (h_ * h_)
                        : fundamental_solution(k, r);
  }
  const Eigen::VectorXcd u = lu_.solve(rhs);
  auto out = far_field_of(u, dirs);
  for (int i = 0; i < dirs.size(); ++i) {
    const double phase = -k * dot(dirs.direction(i), z);
    out[i] += cdouble(std::cos(phase), std::sin(phase));
  }
  return out;
}

FarFieldMatrix dense_oracle_far_field(const WaveContext& ctx, const ContrastField& q,
                                      const DirectionSet& dirs, int coarse_m) {
  if (q.is_zero()) {
    return FarFieldMatrix(ctx, dirs, Eigen::MatrixXcd::Zero(dirs.size(), dirs.size()), q);
  }
  return DenseOracle(ctx, q, coarse_m).far_field_matrix(dirs);
}

}  // namespace scatterbound
