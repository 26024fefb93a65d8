#include <chrono>
#include <cmath>
#include <numbers>
#include <tuple>

#include "doctest.h"
#include "scatterbound/errors.hpp"
#include "scatterbound/forward.hpp"
#include "support.hpp"

using namespace scatterbound;
using cd = std::complex<double>;

namespace {

double max_normalized(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd as_matrix(const std::vector<cd>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Born far field k^2 int exp(i k (theta - xhat) . y) q(y) dy by midpoint quadrature.
Eigen::MatrixXcd born_quadrature(const WaveContext& ctx, const ContrastField& q,
                                 const DirectionSet& dirs, int cells) {
  const Box b = q.support_box();
  const double hx = (b.xmax - b.xmin) / cells, hy = (b.ymax - b.ymin) / cells;
  std::vector<Point2> pts;
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) pts.push_back({b.xmin + (i + 0.5) * hx, b.ymin + (j + 0.5) * hy});
  }
  const auto qv = q.evaluate(pts);
  const int n = dirs.size();
  const double k = ctx.k();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < n; ++c) {
      const Point2 xh = dirs.direction(a), th = dirs.direction(c);
      cd s = 0.0;
      for (std::size_t p = 0; p < pts.size(); ++p) {
        if (qv[p] == 0.0) continue;
        s += qv[p] * std::polar(1.0, k * ((th.x - xh.x) * pts[p].x + (th.y - xh.y) * pts[p].y));
      }
      out(a, c) = k * k * hx * hy * s;
    }
  }
  return out;
}

// Closed form of the Born far field for a constant on a centred square.
cd born_square(double k, double c, double a, Point2 xh, Point2 th) {
  auto f = [&](double p) { return std::fabs(p) < 1e-14 ? 2.0 * a : 2.0 * std::sin(k * p * a) / (k * p); };
  return k * k * c * f(th.x - xh.x) * f(th.y - xh.y);
}

ForwardConfig grid_config(int m) {
  ForwardConfig c;
  c.grid_points = m;
  return c;
}

}  // namespace

TEST_CASE("plane wave incident field has unit modulus") {
  const auto ctx = testsupport::bench_ctx();
  const ComputationalGrid grid(2.0, 64);
  const auto inc = IncidentField::make(ctx, PlaneWave{{std::cos(0.3), std::sin(0.3)}}, grid);
  for (const auto& v : inc.trace.values) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-14));
  const Point2 x = grid.node(1234);
  CHECK(std::abs(inc.trace.values[1234] -
                 std::polar(1.0, ctx.k() * (std::cos(0.3) * x.x + std::sin(0.3) * x.y))) <= 1e-13);
}

TEST_CASE("zero contrast has zero far field and a trivial solve") {
  const auto ctx = testsupport::bench_ctx();
  const ContrastField zero = constant_on_square(0.0);
  const auto f = far_field_matrix(ctx, zero, DirectionSet(16));
  CHECK(f.kernel.norm() == 0.0);
  const ComputationalGrid grid(2.0, 64);
  const auto inc = IncidentField::make(ctx, PlaneWave{}, grid);
  const auto [u, rep] = solve_total_field(ctx, zero, inc, grid, 1e-8);
  CHECK(rep.iterations == 0);
  for (std::size_t i = 0; i < u.values.size(); ++i) CHECK(u.values[i] == inc.trace.values[i]);
}

TEST_CASE("default solve of the constant contrast converges quickly") {
  const auto ctx = testsupport::bench_ctx();
  const ForwardConfig config;
  const auto grid = config.grid();
  CHECK(grid.points_per_dim() == 256);
  const auto inc = IncidentField::make(ctx, PlaneWave{}, grid);
  const auto [u, rep] = solve_total_field(ctx, builtin_qc(), inc, grid, 1e-8);
  CHECK(rep.relative_residual <= 1e-8);
  CHECK(rep.iterations <= 200);
}

TEST_CASE("weak contrasts agree with the Born approximation") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(16);
  const ForwardConfig config = grid_config(128);
  SUBCASE("constant square closed form") {
    const auto born_at = [&](double c) {
      Eigen::MatrixXcd born(16, 16);
      for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) born(a, b) = born_square(ctx.k(), c, 0.7, dirs.direction(a), dirs.direction(b));
      }
      return born;
    };
    const auto plus = far_field_matrix(ctx, constant_on_square(0.01), dirs, config);
    const auto minus = far_field_matrix(ctx, constant_on_square(-0.01), dirs, config);
    const auto tenth = far_field_matrix(ctx, constant_on_square(0.001), dirs, config);
    const Eigen::MatrixXcd odd = 0.5 * (plus.kernel - minus.kernel);
    const double odd_dev = max_normalized(odd, born_at(0.01));
    const double dev = max_normalized(plus.kernel, born_at(0.01));
    const double dev_tenth = max_normalized(tenth.kernel, born_at(0.001));
    MESSAGE("odd part " << odd_dev << ", direct " << dev << ", direct at c/10 " << dev_tenth);
    // the first-order part matches Born; the remainder is the quadratic term
    CHECK(odd_dev <= 2e-3);
    CHECK(dev / dev_tenth == doctest::Approx(10.0).epsilon(0.1));
    CHECK(dev <= 0.025);
  }
  SUBCASE("built-ins scaled to sup norm 0.01") {
    for (const auto& [name, q, sup] : {std::tuple{"qv", builtin_qv(), 0.84}, std::tuple{"qr", builtin_qr(), 0.72},
                                       std::tuple{"sign", sign_changing_demo(), 0.7}}) {
      CAPTURE(name);
      const auto weak = scaled(q, 0.01 / sup);
      const auto f = far_field_matrix(ctx, weak, dirs, config);
      const auto born = born_quadrature(ctx, weak, dirs, 280);
      const double dev = max_normalized(f.kernel, born);
      MESSAGE(std::string(name) << ": " << dev);
      CHECK(dev <= 0.02);
    }
  }
}

TEST_CASE("far field matrix satisfies reciprocity") {
  const auto f = testsupport::bench_far_field("qr", builtin_qr());
  const int n = f.size();
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(f.kernel(i, j) - f.kernel(f.dirs.antipode(j), f.dirs.antipode(i))));
    }
  }
  CHECK(worst <= 1e-6 * f.kernel.cwiseAbs().maxCoeff());
}

TEST_CASE("background Green's function far field") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(16);
  const ContrastField zero = constant_on_square(0.0);
  const Point2 z{0.3, -0.2};
  const auto g = green_far_field(ctx, zero, z, dirs);
  for (int i = 0; i < 16; ++i) {
    const Point2 d = dirs.direction(i);
    CHECK(std::abs(g[i] - std::polar(1.0, -ctx.k() * (d.x * z.x + d.y * z.y))) <= 1e-15);
  }
  const auto g0 = green_far_field(ctx, zero, {0.0, 0.0}, dirs);
  for (const auto& v : g0) CHECK(v == cd(1.0, 0.0));
  CHECK_THROWS_AS(green_far_field(ctx, zero, {2.5, 0.0}, dirs), PreconditionError);
}

TEST_CASE("FFT solver agrees with the dense oracle") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(16);
  SUBCASE("zero contrast") {
    const auto f = dense_oracle_far_field(ctx, constant_on_square(0.0), dirs, 16);
    CHECK(f.kernel.norm() == 0.0);
  }
  SUBCASE("weak contrast matches Born") {
    const auto weak = constant_on_square(0.001);
    const auto f = dense_oracle_far_field(ctx, weak, dirs, 40);
    Eigen::MatrixXcd born(16, 16);
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) born(a, b) = born_square(ctx.k(), 0.001, 0.7, dirs.direction(a), dirs.direction(b));
    }
    CHECK(max_normalized(f.kernel, born) <= 5e-3);
  }
  SUBCASE("constant contrast far field matrix") {
    const auto fft = far_field_matrix(ctx, builtin_qc(), dirs);
    const auto dense = dense_oracle_far_field(ctx, builtin_qc(), dirs, 48);
    CHECK(max_normalized(fft.kernel, dense.kernel) <= 1e-2);
  }
  SUBCASE("Green's function far field with background") {
    const Point2 z{0.2, 0.0};
    const auto fft = green_far_field(ctx, builtin_qc(), z, dirs);
    const DenseOracle oracle(ctx, builtin_qc(), 48);
    const auto dense = oracle.green_far_field(z, dirs);
    CHECK(max_normalized(as_matrix(fft), as_matrix(dense)) <= 1e-2);
  }
}

TEST_CASE("far field converges under grid refinement") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(16);
  std::vector<Eigen::MatrixXcd> v;
  for (int m : {64, 128, 256, 512}) {
    const ComputationalGrid grid(2.0, m);
    const auto inc = IncidentField::make(ctx, PlaneWave{{1.0, 0.0}}, grid);
    const auto [u, rep] = solve_total_field(ctx, builtin_qc(), inc, grid, 1e-10);
    v.push_back(as_matrix(far_field_vector(ctx, builtin_qc(), u, dirs)));
  }
  const double d64 = max_normalized(v[1], v[0]);
  const double d128 = max_normalized(v[2], v[1]);
  const double d256 = max_normalized(v[3], v[2]);
  MESSAGE("consecutive changes: " << d64 << " " << d128 << " " << d256);
  CHECK(d64 >= 2.0 * d128);
  CHECK(d128 <= 3.0 * d256);
  CHECK(d256 <= 1e-3);
}

TEST_CASE("forward preconditions and convergence failure") {
  const auto ctx = testsupport::bench_ctx();
  const ComputationalGrid grid(2.0, 64);
  const auto inc = IncidentField::make(ctx, PlaneWave{}, grid);
  CHECK_THROWS_AS(solve_total_field(ctx, builtin_qc(), inc, grid, 1e-2), PreconditionError);
  CHECK_THROWS_AS(solve_total_field(ctx, builtin_qc(), inc, grid, 1e-14), PreconditionError);
  CHECK_THROWS_AS(solve_total_field(ctx, constant_on_square(0.4, 1.5), inc, grid, 1e-8), PreconditionError);
  ForwardConfig starved;
  starved.restart = 2;
  starved.max_iterations = 2;
  try {
    solve_total_field(ctx, builtin_qc(), inc, grid, 1e-12, starved);
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() <= 2);
    CHECK(e.residual() > 1e-12);
  }
  CHECK_THROWS_AS(ComputationalGrid(2.0, 7), PreconditionError);
}

TEST_CASE("far field matrix is independent of the thread count") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(8);
  ForwardConfig one = grid_config(64), many = grid_config(64);
  one.threads = 1;
  many.threads = 4;
  const auto a = far_field_matrix(ctx, builtin_qr(), dirs, one);
  const auto b = far_field_matrix(ctx, builtin_qr(), dirs, many);
  CHECK(a.kernel == b.kernel);
}
