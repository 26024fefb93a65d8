#include <cmath>
#include <numbers>

#include "doctest.h"
#include "scatterbound/errors.hpp"
#include "scatterbound/inversion_bounds.hpp"
#include "scatterbound/operators.hpp"
#include "support.hpp"

using namespace scatterbound;
using cd = std::complex<double>;

namespace {

Orientation calibrated() {
  static const Orientation o = calibrate_orientation(
      testsupport::bank_member(0.4), 0.4, testsupport::bank_member(0.0), 0.0);
  return o;
}

Verdict flipped(Verdict v) {
  if (v == Verdict::TestBelow) return Verdict::TestAbove;
  if (v == Verdict::TestAbove) return Verdict::TestBelow;
  return v;
}

bool near_corner(double s, double a) {
  const double side = 2.0 * a;
  const double r = std::fmod(s, side);
  return std::min(r, side - r) < 0.1;
}

}  // namespace

TEST_CASE("annulus counting on a diagonal matrix") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
  d(0, 0) = 0.0;
  d(1, 1) = cd(1e-5, 1e-6);
  d(2, 2) = cd(-1e-4, 1e-5);
  d(3, 3) = 0.5;
  const auto c = annulus_counts(d);
  CHECK(c.m_plus == 1);
  CHECK(c.m_minus == 1);
  CHECK(c.r_min == 1e-8);
  CHECK(c.r_max == 1e-2);
  Eigen::MatrixXcd imag = Eigen::MatrixXcd::Zero(2, 2);
  imag(0, 0) = cd(0.0, 1e-4);
  const auto z = annulus_counts(imag);
  CHECK(z.m_plus == 0);
  CHECK(z.m_minus == 0);
  CHECK_THROWS_AS(annulus_counts(d, 1e-2, 1e-8), PreconditionError);
  CHECK_THROWS_AS(annulus_counts(d, 0.0, 1e-2), PreconditionError);
}

TEST_CASE("verdicts from counts") {
  const auto counts = [](int p, int m) {
    AnnulusCounts c;
    c.m_plus = p;
    c.m_minus = m;
    return c;
  };
  CHECK(bound_verdict(counts(0, 3), Orientation::PlusVanishesBelow) == Verdict::TestBelow);
  CHECK(bound_verdict(counts(0, 3), Orientation::MinusVanishesBelow) == Verdict::TestAbove);
  CHECK(bound_verdict(counts(3, 0), Orientation::MinusVanishesBelow) == Verdict::TestBelow);
  CHECK(bound_verdict(counts(0, 0), Orientation::PlusVanishesBelow) == Verdict::Indistinguishable);
  CHECK(bound_verdict(counts(2, 3), Orientation::PlusVanishesBelow) == Verdict::Indeterminate);
  for (auto v : {Verdict::TestBelow, Verdict::TestAbove, Verdict::Indistinguishable, Verdict::Indeterminate}) {
    CHECK(verdict_from_string(to_string(v)) == v);
  }
  for (auto o : {Orientation::PlusVanishesBelow, Orientation::MinusVanishesBelow}) {
    CHECK(orientation_from_string(to_string(o)) == o);
  }
  CHECK_THROWS_AS(orientation_from_string("sideways"), PreconditionError);
}

TEST_CASE("constant contrast: exactly one count vanishes and the side flips at 0.4") {
  const auto& fq = testsupport::bank_member(0.4);
  const auto below = compare_counts(fq, testsupport::bank_member(0.0));
  const auto above = compare_counts(fq, testsupport::bank_member(0.8));
  CHECK((below.m_plus == 0) != (below.m_minus == 0));
  CHECK((above.m_plus == 0) != (above.m_minus == 0));
  CHECK((below.m_plus == 0) == (above.m_minus == 0));
  const auto same = compare_counts(fq, fq);
  CHECK(same.m_plus == 0);
  CHECK(same.m_minus == 0);
  MESSAGE("c=0.0: m_plus=" << below.m_plus << " m_minus=" << below.m_minus
                           << "; c=0.8: m_plus=" << above.m_plus << " m_minus=" << above.m_minus);
}

TEST_CASE("calibration is consistent across probes and rejects the boundary value") {
  const auto& ref = testsupport::bank_member(0.4);
  const Orientation lo = calibrate_orientation(ref, 0.4, testsupport::bank_member(0.0), 0.0);
  const Orientation hi = calibrate_orientation(ref, 0.4, testsupport::bank_member(0.8), 0.8);
  CHECK(lo == hi);
  try {
    calibrate_orientation(ref, 0.4, testsupport::bank_member(0.4), 0.4);
    FAIL("expected an indeterminate calibration");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("calibration indeterminate") != std::string::npos);
  }
  const Orientation synthesized = calibrate_orientation(
      testsupport::bench_ctx(), testsupport::bench_dirs(), ForwardConfig{}, builtin_qc(), 0.4, 0.0);
  CHECK(synthesized == lo);
}

TEST_CASE("verdicts flip when the arguments are swapped") {
  const Orientation o = calibrated();
  const auto qr = testsupport::bench_far_field("qr", builtin_qr());
  for (double c : {0.0, 0.2, 0.7, 1.0}) {
    CAPTURE(c);
    const auto& ft = testsupport::bank_member(c);
    for (const FarFieldMatrix* fq : {&testsupport::bank_member(0.4), &qr}) {
      const Verdict v = bound_verdict(compare_counts(*fq, ft), o);
      const Verdict w = bound_verdict(compare_counts(ft, *fq), o);
      CHECK(v != Verdict::Indeterminate);
      CHECK(w == flipped(v));
    }
  }
}

TEST_CASE("constant bound search on the built-in contrasts") {
  const Orientation o = calibrated();
  const auto& bank = testsupport::constant_bank();
  const double t = 0.1;
  SUBCASE("constant contrast") {
    const auto r = constant_bound_search(testsupport::bank_member(0.4), bank, t, 0.0, 1.0, o);
    CHECK(r.c_star == 0.4);
    CHECK(r.c_upper == 0.4);
    CHECK(r.orientation == o);
    CHECK(r.warnings.empty());
    for (std::size_t i = 1; i < r.trail.size(); ++i) CHECK(r.trail[i - 1].c < r.trail[i].c);
  }
  SUBCASE("soundness and reported intervals") {
    struct Case {
      std::string name;
      ContrastField q;
      double lo, hi;
    };
    for (const auto& cs : {Case{"qr", builtin_qr(), 0.4, 0.5}, Case{"qv", builtin_qv(), 0.5, 0.9},
                           Case{"qv_symmetric", builtin_qv(true), 0.5, 0.6}}) {
      CAPTURE(cs.name);
      const auto r = constant_bound_search(testsupport::bench_far_field(cs.name, cs.q), bank, t, 0.0, 1.0, o);
      double tmin = 1e9, tmax = -1e9;
      for (const auto& s : boundary_trace(cs.q, 64)) {
        tmin = std::min(tmin, s.value);
        tmax = std::max(tmax, s.value);
      }
      CHECK(r.c_star <= r.c_upper);
      CHECK(r.c_star <= tmin + t + 1e-12);
      CHECK(r.c_upper >= tmax - t - 1e-12);
      CHECK(r.c_star == doctest::Approx(cs.lo).epsilon(1e-12));
      CHECK(r.c_upper == doctest::Approx(cs.hi).epsilon(1e-12));
    }
  }
  SUBCASE("stable under bank extension") {
    ConstantBank small;
    for (const auto& e : bank) {
      if (e.first >= -1e-9 && e.first <= 1.0 + 1e-9) small.push_back(e);
    }
    const auto qr = testsupport::bench_far_field("qr", builtin_qr());
    const auto a = constant_bound_search(qr, small, t, 0.0, 1.0, o);
    const auto b = constant_bound_search(qr, bank, t, 0.0, 1.0, o);
    CHECK(b.c_star >= a.c_star - t - 1e-12);
    CHECK(b.c_upper <= a.c_upper + t + 1e-12);
  }
  SUBCASE("clamping at the bank edge records a warning") {
    ConstantBank narrow;
    for (const auto& e : bank) {
      if (e.first >= -1e-9 && e.first <= 0.2 + 1e-9) narrow.push_back(e);
    }
    const auto r = constant_bound_search(testsupport::bank_member(0.4), narrow, t, 0.0, 0.2, o);
    CHECK_FALSE(r.warnings.empty());
    CHECK(r.c_star <= 0.2 + 1e-12);
  }
}

TEST_CASE("search fails when every comparison is sign-indefinite") {
  const int n = 8;
  const WaveContext ctx = testsupport::bench_ctx();
  const DirectionSet dirs(n);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(n, n);
  u(0, 0) = 1e-4 / dirs.weight();
  u(1, 1) = -1e-4 / dirs.weight();
  const FarFieldMatrix fq(ctx, dirs, u);
  ConstantBank bank;
  for (double c : uniform_values(0.0, 0.5, 0.1)) {
    bank.emplace_back(c, FarFieldMatrix(ctx, dirs, Eigen::MatrixXcd::Zero(n, n)));
  }
  try {
    constant_bound_search(fq, bank, 0.1, 0.1, 0.4, Orientation::PlusVanishesBelow);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("no sign-definite comparison found") != std::string::npos);
  }
}

TEST_CASE("linear test family") {
  CHECK(linear_test_family().size() == 1452);
  CHECK(default_slopes().size() == 11);
  CHECK(default_slopes()[1] == doctest::Approx(-1.6));
  CHECK(default_offsets().size() == 11);
  const LinearContrast p{{0.7, 0.0}, 1.0, 0.5};
  CHECK(p.evaluate({0.0, 0.0}) == doctest::Approx(-0.2).epsilon(1e-15));
  const LinearContrast flat{{0.0, 0.7}, 0.0, 0.3};
  const ContrastField constant = constant_on_square(0.3);
  for (Point2 x : {Point2{0.1, 0.2}, Point2{-0.69, 0.5}, Point2{0.7, -0.7}}) {
    CHECK(flat.contrast().evaluate(x) == constant.evaluate(x));
  }
  const auto anchors = boundary_anchor_points(12);
  REQUIRE(anchors.size() == 12);
  CHECK(anchors[0].x == doctest::Approx(0.7));
  CHECK(anchors[0].y == doctest::Approx(0.0));
  for (const auto& a : anchors) CHECK(std::max(std::fabs(a.x), std::fabs(a.y)) == doctest::Approx(0.7));
  const auto fam = linear_test_family(12, {-1.0, 1.0}, {0.0, 0.5, 1.0});
  CHECK(fam.size() == 72);
  CHECK(fam[5].anchor.x == anchors[0].x);
  CHECK(fam[6].anchor.y == anchors[1].y);
}

TEST_CASE("boundary samples and traces") {
  const auto samples = boundary_samples(Box::square(0.7), 64);
  REQUIRE(samples.size() == 256);
  CHECK(samples[0].second.x == -0.7);
  CHECK(samples[0].second.y == -0.7);
  CHECK(samples[0].first == 0.0);
  CHECK(samples[64].first == doctest::Approx(1.4));
  CHECK(samples[64].second.x == doctest::Approx(0.7));
  CHECK(samples[64].second.y == doctest::Approx(-0.7));
  for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i].first > samples[i - 1].first);
  for (const auto& s : boundary_trace(builtin_qc(), 32)) CHECK(s.value == 0.4);
  for (const auto& s : boundary_trace(builtin_qr(), 32)) CHECK(std::fabs(s.value - 0.44) <= 1e-6);
  for (const auto& s : boundary_trace(builtin_qv(true), 32)) CHECK(std::fabs(s.value - 0.56) <= 1e-6);
}

TEST_CASE("linear refinement on the reduced bank") {
  const Orientation o = calibrated();
  const auto& bank = testsupport::reduced_linear_bank();
  REQUIRE(bank.size() == 360);
  struct Case {
    std::string name;
    ContrastField q;
  };
  for (const auto& cs : {Case{"qc", builtin_qc()}, Case{"qr", builtin_qr()}, Case{"qv", builtin_qv()}}) {
    CAPTURE(cs.name);
    const auto f = cs.name == "qc" ? testsupport::bank_member(0.4)
                                   : testsupport::bench_far_field(cs.name, cs.q);
    const auto tb = linear_refinement(f, bank, o);
    REQUIRE(tb.s.size() == 256);
    CHECK(tb.orientation == o);
    const auto trace = boundary_trace(cs.q, 64);
    double worst = 0.0, worst_interior = 0.0, corner_crossing = 0.0;
    for (std::size_t k = 0; k < tb.s.size(); ++k) {
      const double dev = std::max(std::fabs(trace[k].value - tb.q_plus[k]),
                                  std::fabs(trace[k].value - tb.q_minus[k]));
      worst = std::max(worst, dev);
      if (near_corner(tb.s[k], 0.7)) {
        corner_crossing = std::max(corner_crossing, tb.q_minus[k] - tb.q_plus[k]);
        continue;
      }
      if (cs.name == "qc") CHECK(tb.q_minus[k] <= tb.q_plus[k] + 1e-12);
      worst_interior = std::max(worst_interior, dev);
      if (cs.name == "qr") {
        CHECK(tb.q_minus[k] <= trace[k].value + 0.1);
        CHECK(tb.q_plus[k] >= trace[k].value - 0.1);
      }
    }
    MESSAGE(cs.name << ": max deviation " << worst << ", away from corners " << worst_interior
                    << ", largest corner crossing q- - q+ " << corner_crossing << ", accepted below "
                    << tb.accepted_below << " above " << tb.accepted_above);
    if (cs.name == "qc") CHECK(worst_interior <= 0.15);
    for (int e = 0; e < 4; ++e) {
      for (int i = 0; i + 2 <= 64; ++i) {
        const std::size_t a = 64 * e + i, b = (64 * e + i + 2) % 256, mid = 64 * e + i + 1;
        CHECK(tb.q_plus[mid] >= 0.5 * (tb.q_plus[a] + tb.q_plus[b]) - 1e-12);
        CHECK(tb.q_minus[mid] <= 0.5 * (tb.q_minus[a] + tb.q_minus[b]) + 1e-12);
      }
    }
  }
}

TEST_CASE("linear refinement preconditions") {
  CHECK_THROWS_AS(linear_refinement(testsupport::bank_member(0.4), {}, Orientation::PlusVanishesBelow),
                  PreconditionError);
  const auto& fq = testsupport::bank_member(0.4);
  LinearBank same{{LinearContrast{{0.7, 0.0}, 0.0, 0.4}, fq}};
  CHECK_THROWS_AS(linear_refinement(fq, same, Orientation::PlusVanishesBelow), NumericalError);
}
