#include <cmath>
#include <numbers>

#include "doctest.h"
#include "scatterbound/errors.hpp"
#include "scatterbound/inversion_fm.hpp"
#include "scatterbound/operators.hpp"
#include "scatterbound/spectral.hpp"
#include "support.hpp"

using namespace scatterbound;
using cd = std::complex<double>;

namespace {

using testsupport::demo_far_field;

SamplingGrid demo_grid() { return SamplingGrid(Box::square(1.2), 61); }

std::pair<double, double> inside_outside_medians(const IndicatorMap& map, const Box& inside,
                                                 const Box& support) {
  std::vector<double> in, out;
  for (std::size_t i = 0; i < map.grid.size(); ++i) {
    const Point2 z = map.grid.points()[i];
    if (inside.contains(z)) in.push_back(map.values[i]);
    if (testsupport::distance_to_box(z, support) > 0.3) out.push_back(map.values[i]);
  }
  return {testsupport::median(in), testsupport::median(out)};
}

std::size_t index_of(const SamplingGrid& g, Point2 p) {
  const Box& b = g.box();
  const int r = g.resolution();
  const auto ix = std::lround((p.x - b.xmin) / (b.xmax - b.xmin) * (r - 1));
  const auto iy = std::lround((p.y - b.ymin) / (b.ymax - b.ymin) * (r - 1));
  return static_cast<std::size_t>(iy * r + ix);
}

}  // namespace

TEST_CASE("sampling grid layout") {
  const SamplingGrid g(Box::square(1.0), 3);
  REQUIRE(g.size() == 9);
  CHECK(g.points()[0].x == -1.0);
  CHECK(g.points()[0].y == -1.0);
  CHECK(g.points()[1].x == 0.0);
  CHECK(g.points()[3].y == 0.0);
  CHECK(g.points()[8].x == 1.0);
  CHECK_THROWS_AS(SamplingGrid(Box::square(1.0), 1), PreconditionError);
}

TEST_CASE("normalization") {
  const auto v = normalize_to_max({0.5, 2.0, 1.0});
  CHECK(v[1] == 1.0);
  CHECK(v[0] == 0.25);
  CHECK(normalize_to_max(v) == v);
  CHECK_THROWS_AS(normalize_to_max({0.0, 0.0}), NumericalError);
  CHECK_THROWS_AS(normalize_to_max({1.0, std::nan("")}), NumericalError);
}

TEST_CASE("factorization indicator separates the sign-changing demo") {
  const auto& f = demo_far_field();
  const auto map = fm_indicator_map(f, demo_grid(), 1e-8);
  for (double v : map.values) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(*std::max_element(map.values.begin(), map.values.end()) == 1.0);
  const Box d = Box::square(0.7);
  const auto [in, out] = inside_outside_medians(map, d, d);
  MESSAGE("alpha 1e-8: inside/outside median ratio " << in / out);
  CHECK(in >= 10.0 * out);
  const auto map10 = fm_indicator_map(f, demo_grid(), 1e-7);
  const auto [in10, out10] = inside_outside_medians(map10, d, d);
  MESSAGE("alpha 1e-7: inside/outside median ratio " << in10 / out10);
  CHECK(in10 > out10);
  CHECK(in10 >= 10.0 * out10);
}

TEST_CASE("factorization indicator of the constant contrast peaks inside") {
  const auto f = testsupport::bench_far_field("qc", builtin_qc());
  const SamplingGrid g(Box::square(1.5), 3);
  const auto map = fm_indicator_map(f, g);
  CHECK(map.values[4] > map.values[8]);
}

TEST_CASE("factorization indicator invariances") {
  const auto f = testsupport::bench_far_field("qr", builtin_qr());
  const SamplingGrid g(Box::square(1.2), 25);
  const auto base = fm_indicator_map(f, g);
  SUBCASE("global phase of the kernel") {
    FarFieldMatrix rotated = f;
    rotated.kernel *= std::polar(1.0, 0.9);
    const auto m = fm_indicator_map(rotated, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::fabs(m.values[i] - base.values[i]) <= 1e-7);
  }
  SUBCASE("cyclic relabeling of the directions") {
    const int n = f.size(), s = n / 4;
    FarFieldMatrix shifted = f;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) shifted.kernel(i, j) = f.kernel((i + s) % n, (j + s) % n);
    }
    const auto m = fm_indicator_map(shifted, g);
    // A quarter-turn relabeling equals the data of the quarter-turned contrast.
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point2 z = g.points()[i];
      CHECK(std::fabs(m.values[i] - base.values[index_of(g, {-z.y, z.x})]) <= 1e-7);
    }
  }
}

TEST_CASE("factorization indicator without data is an error") {
  const FarFieldMatrix zero(testsupport::bench_ctx(), DirectionSet(16), Eigen::MatrixXcd::Zero(16, 16));
  try {
    fm_indicator_map(zero, SamplingGrid(Box::square(1.0), 5));
    FAIL("expected an error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("no scattering data") != std::string::npos);
  }
}

TEST_CASE("M-sharp indicator with free-space background reduces to F alone") {
  const auto ctx = testsupport::bench_ctx();
  const DirectionSet dirs(16);
  ForwardConfig config;
  config.grid_points = 128;
  config.tolerance = 1e-12;
  const auto f1 = far_field_matrix(ctx, builtin_qc(), dirs, config);
  const SamplingGrid g(Box::square(1.0), 7);
  const auto map = msharp_indicator_map(f1, constant_on_square(0.0), g, 1e-8, config);

  const auto spec = eig_hermitian(msharp_matrix(f1.weighted(), 1e-12));
  std::vector<double> expected;
  for (const auto& z : g.points()) {
    Eigen::VectorXcd phi(16);
    for (int i = 0; i < 16; ++i) {
      const Point2 d = dirs.direction(i);
      phi(i) = std::polar(1.0, -ctx.k() * (d.x * z.x + d.y * z.y));
    }
    expected.push_back(1.0 / damped_picard_sum(spec, phi, 1e-8, PicardExponent::Half));
  }
  expected = normalize_to_max(expected);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::fabs(map.values[i] - expected[i]) <= 1e-10);
}

TEST_CASE("M-sharp indicator locates a perturbation of a known background") {
  const auto q2 = builtin_qc();
  const auto f1 = testsupport::bench_far_field("qc_bump", testsupport::bump_contrast());
  const SamplingGrid g(Box::square(1.2), 21);
  const auto map = msharp_indicator_map(f1, q2, g);
  const Box bump{0.1, 0.5, 0.1, 0.5};
  const auto [in, out] = inside_outside_medians(map, bump, Box::square(0.7));
  MESSAGE("bump inside/outside median ratio " << in / out);
  CHECK(in >= 5.0 * out);
}

TEST_CASE("M-sharp indicator without perturbation is an error") {
  const auto f = testsupport::bench_far_field("qc", builtin_qc());
  try {
    msharp_indicator_map(f, builtin_qc(), SamplingGrid(Box::square(1.0), 3));
    FAIL("expected an error");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("no scattering data") != std::string::npos);
  }
}
