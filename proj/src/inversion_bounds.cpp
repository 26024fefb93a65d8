#include "scatterbound/inversion_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "scatterbound/errors.hpp"
#include "scatterbound/operators.hpp"
#include "scatterbound/parallel.hpp"
#include "scatterbound/spectral.hpp"

namespace scatterbound {

AnnulusCounts annulus_counts(const Eigen::MatrixXcd& a, double r_min, double r_max) {
  if (!(r_min > 0.0) || !(r_min < r_max)) {
    throw PreconditionError("annulus_counts: need 0 < r_min < r_max");
  }
  AnnulusCounts out{r_min, r_max, 0, 0};
  const OperatorSpectrum spec = eig_general(a);
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const cdouble lam = spec.eigenvalues(i);
    const double mag = std::abs(lam);
    if (mag < r_min || mag > r_max) continue;
    if (lam.real() > 0.0) ++out.m_plus;
    else if (lam.real() < 0.0) ++out.m_minus;
  }
  return out;
}

std::string to_string(Orientation o) {
  return o == Orientation::PlusVanishesBelow ? "PlusVanishesBelow" : "MinusVanishesBelow";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::TestBelow: return "TestBelow";
    case Verdict::TestAbove: return "TestAbove";
    case Verdict::Indistinguishable: return "Indistinguishable";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "PlusVanishesBelow") return Orientation::PlusVanishesBelow;
  if (s == "MinusVanishesBelow") return Orientation::MinusVanishesBelow;
  throw PreconditionError("unknown orientation '" + s + "'");
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::TestBelow, Verdict::TestAbove, Verdict::Indistinguishable,
                    Verdict::Indeterminate}) {
    if (to_string(v) == s) return v;
  }
  throw PreconditionError("unknown verdict '" + s + "'");
}

Verdict bound_verdict(const AnnulusCounts& counts, Orientation orientation) {
  if (counts.m_plus == 0 && counts.m_minus == 0) return Verdict::Indistinguishable;
  if (counts.m_plus > 0 && counts.m_minus > 0) return Verdict::Indeterminate;
  const bool plus_vanishes = counts.m_plus == 0;
  const bool below = plus_vanishes == (orientation == Orientation::PlusVanishesBelow);
  return below ? Verdict::TestBelow : Verdict::TestAbove;
}

AnnulusCounts compare_counts(const FarFieldMatrix& f_q, const FarFieldMatrix& f_test, double r_min,
                             double r_max) {
  return annulus_counts(comparison_matrix(f_q, f_test), r_min, r_max);
}

Orientation calibrate_orientation(const FarFieldMatrix& f_ref, double boundary_value,
                                  const FarFieldMatrix& f_probe, double probe_c, double r_min,
                                  double r_max) {
  const AnnulusCounts c = compare_counts(f_ref, f_probe, r_min, r_max);
  if ((c.m_plus == 0) == (c.m_minus == 0)) {
    std::ostringstream os;
    os << "calibration indeterminate - adjust annulus or grid (m_plus=" << c.m_plus
       << ", m_minus=" << c.m_minus << ")";
    throw NumericalError(os.str());
  }
  const bool probe_below = probe_c < boundary_value;
  const bool plus_vanishes = c.m_plus == 0;
  return plus_vanishes == probe_below ? Orientation::PlusVanishesBelow
                                      : Orientation::MinusVanishesBelow;
}

Orientation calibrate_orientation(const WaveContext& ctx, const DirectionSet& dirs,
                                  const ForwardConfig& config, const ContrastField& reference_q,
                                  double boundary_value, double probe_c, double r_min,
                                  double r_max) {
  const Box& b = reference_q.support_box();
  const double a = 0.5 * (b.xmax - b.xmin);
  if (std::fabs(0.5 * (b.ymax - b.ymin) - a) > 1e-12) {
    throw PreconditionError("calibrate_orientation: reference support must be a square");
  }
  const Point2 center{0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
  const FarFieldMatrix f_ref = far_field_matrix(ctx, reference_q, dirs, config);
  const FarFieldMatrix f_probe =
      far_field_matrix(ctx, constant_on_square(probe_c, a, center), dirs, config);
  return calibrate_orientation(f_ref, boundary_value, f_probe, probe_c, r_min, r_max);
}

std::vector<double> uniform_values(double first, double last, double step) {
  if (!(step > 0.0) || last < first) throw PreconditionError("uniform_values: bad range");
  const int count = static_cast<int>(std::floor((last - first) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    // round to 12 decimals so 0.1-steps produce the literal values
    out.push_back(std::round((first + i * step) * 1e12) / 1e12);
  }
  return out;
}

ConstantBank synthesize_constant_bank(const WaveContext& ctx, const DirectionSet& dirs,
                                      const ForwardConfig& config, const std::vector<double>& values,
                                      double half_width) {
  ConstantBank bank;
  bank.reserve(values.size());
  for (double c : values) {
    bank.emplace_back(c, far_field_matrix(ctx, constant_on_square(c, half_width), dirs, config));
  }
  return bank;
}

BoundsResult constant_bound_search(const FarFieldMatrix& f_q, const ConstantBank& bank, double step,
                                   double c_lo, double c_hi, Orientation orientation,
                                   double r_min, double r_max) {
  if (bank.empty()) throw PreconditionError("constant_bound_search: empty bank");
  if (!(step > 0.0)) throw PreconditionError("constant_bound_search: step must be positive");
  if (!(c_lo < c_hi)) throw PreconditionError("constant_bound_search: need c_lo < c_hi");

  BoundsResult res;
  res.orientation = orientation;
  res.r_min = r_min;
  res.r_max = r_max;
  const double tol = 1e-6 * step;
  auto find = [&](double c) -> const std::pair<double, FarFieldMatrix>* {
    for (const auto& e : bank) {
      if (std::fabs(e.first - c) <= tol) return &e;
    }
    return nullptr;
  };
  // c values always snap to the exact bank keys so repeated steps do not drift
  auto snap = [&](double c) { return find(c)->first; };
  std::map<long long, Verdict> memo;
  auto verdict_at = [&](double c) {
    const long long key = std::llround(c / tol);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const AnnulusCounts counts = compare_counts(f_q, find(c)->second, r_min, r_max);
    const Verdict v = bound_verdict(counts, orientation);
    res.trail.push_back({c, counts, v});
    memo.emplace(key, v);
    return v;
  };
  auto clamp_start = [&](double c, const char* name) {
    if (find(c)) return c;
    double best = bank.front().first;
    for (const auto& [v, f] : bank) {
      if (std::fabs(v - c) < std::fabs(best - c)) best = v;
    }
    res.warnings.push_back(std::string(name) + " outside bank, clamped to " + std::to_string(best));
    return best;
  };
  // Moves c by `delta` while `keep(verdict)` holds. Returns true if a step left the bank.
  auto walk = [&](double& c, double delta, auto keep) {
    while (true) {
      const Verdict v = verdict_at(c);
      if (v == Verdict::Indistinguishable || !keep(v)) return false;
      const double next = c + delta;
      if (!find(next)) {
        res.warnings.push_back("search reached bank edge at c = " + std::to_string(c));
        return true;
      }
      c = snap(next);
    }
  };

  // lower bound
  double c = clamp_start(c_lo, "c_lo");
  Verdict v0 = verdict_at(c);
  if (v0 == Verdict::TestBelow) {
    const bool edge = walk(c, step, [](Verdict v) { return v == Verdict::TestBelow; });
    if (!edge && verdict_at(c) != Verdict::Indistinguishable) c = snap(c - step);
  } else if (v0 != Verdict::Indistinguishable) {
    walk(c, -step, [](Verdict v) { return v != Verdict::TestBelow; });
  }
  res.c_star = c;

  // upper bound
  c = clamp_start(c_hi, "c_hi");
  v0 = verdict_at(c);
  if (v0 == Verdict::TestAbove) {
    const bool edge = walk(c, -step, [](Verdict v) { return v == Verdict::TestAbove; });
    if (!edge && verdict_at(c) != Verdict::Indistinguishable) c = snap(c + step);
  } else if (v0 != Verdict::Indistinguishable) {
    walk(c, step, [](Verdict v) { return v != Verdict::TestAbove; });
  }
  res.c_upper = c;

  if (std::all_of(res.trail.begin(), res.trail.end(),
                  [](const TrailEntry& e) { return e.verdict == Verdict::Indeterminate; })) {
    throw NumericalError("no sign-definite comparison found");
  }
  std::sort(res.trail.begin(), res.trail.end(),
            [](const TrailEntry& a, const TrailEntry& b) { return a.c < b.c; });
  return res;
}

double LinearContrast::evaluate(Point2 x) const {
  const double r = std::hypot(anchor.x, anchor.y);
  return slope * ((anchor.x / r) * (x.x - anchor.x) + (anchor.y / r) * (x.y - anchor.y)) + offset;
}

ContrastField LinearContrast::contrast() const {
  return linear_on_square(anchor, slope, offset, half_width);
}

namespace {

// Point at arclength s along the boundary of [-a, a]^2, counterclockwise from (-a, -a).
Point2 boundary_point(double s, double a) {
  const double side = 2.0 * a;
  const double per = 4.0 * side;
  s = std::fmod(std::fmod(s, per) + per, per);
  if (s < side) return {-a + s, -a};
  if (s < 2 * side) return {a, -a + (s - side)};
  if (s < 3 * side) return {a - (s - 2 * side), a};
  return {-a, a - (s - 3 * side)};
}

}  // namespace

std::vector<Point2> boundary_anchor_points(int n_points, double half_width) {
  if (n_points < 1) throw PreconditionError("boundary_anchor_points: need at least one point");
  const double per = 8.0 * half_width;
  std::vector<Point2> out;
  // (a, 0) sits at arclength 3a from (-a, -a)
  for (int j = 0; j < n_points; ++j) out.push_back(boundary_point(3.0 * half_width + j * per / n_points, half_width));
  return out;
}

std::vector<double> default_slopes() { return uniform_values(-2.0, 2.0, 0.4); }
std::vector<double> default_offsets() { return uniform_values(0.0, 1.0, 0.1); }

std::vector<LinearContrast> linear_test_family(int n_points, const std::vector<double>& slopes,
                                               const std::vector<double>& offsets,
                                               double half_width) {
  if (n_points < 1 || slopes.empty() || offsets.empty() || !(half_width > 0.0)) {
    throw PreconditionError("linear_test_family: parameters must be positive and nonempty");
  }
  std::vector<LinearContrast> out;
  out.reserve(static_cast<std::size_t>(n_points) * slopes.size() * offsets.size());
  for (const Point2& x : boundary_anchor_points(n_points, half_width)) {
    for (double s : slopes) {
      for (double o : offsets) out.push_back({x, s, o, half_width});
    }
  }
  return out;
}

std::vector<LinearContrast> linear_test_family() {
  return linear_test_family(12, default_slopes(), default_offsets());
}

LinearBank synthesize_linear_bank(const WaveContext& ctx, const DirectionSet& dirs,
                                  const ForwardConfig& config,
                                  const std::vector<LinearContrast>& family) {
  LinearBank bank;
  bank.reserve(family.size());
  for (const auto& p : family) bank.emplace_back(p, far_field_matrix(ctx, p.contrast(), dirs, config));
  return bank;
}

std::vector<std::pair<double, Point2>> boundary_samples(const Box& square, int n_per_edge) {
  if (n_per_edge < 1) throw PreconditionError("boundary_samples: need at least one sample per edge");
  const double a = 0.5 * (square.xmax - square.xmin);
  if (std::fabs(0.5 * (square.ymax - square.ymin) - a) > 1e-12) {
    throw PreconditionError("boundary samples need a square support");
  }
  const Point2 c{0.5 * (square.xmin + square.xmax), 0.5 * (square.ymin + square.ymax)};
  const int total = 4 * n_per_edge;
  const double ds = 8.0 * a / total;
  std::vector<std::pair<double, Point2>> out;
  out.reserve(total);
  for (int i = 0; i < total; ++i) {
    const Point2 p = boundary_point(i * ds, a);
    out.emplace_back(i * ds, Point2{p.x + c.x, p.y + c.y});
  }
  return out;
}

std::vector<TraceSample> boundary_trace(const ContrastField& q, int n_per_edge) {
  const Box& b = q.support_box();
  constexpr double inset = 1e-6;
  std::vector<TraceSample> out;
  for (const auto& [s, p] : boundary_samples(b, n_per_edge)) {
    const Point2 in{std::clamp(p.x, b.xmin + inset, b.xmax - inset),
                    std::clamp(p.y, b.ymin + inset, b.ymax - inset)};
    out.push_back({s, p, q.evaluate(in)});
  }
  return out;
}

TraceBounds linear_refinement(const FarFieldMatrix& f_q, const LinearBank& bank,
                              Orientation orientation, double init_magnitude, int samples_per_edge,
                              double r_min, double r_max, int threads) {
  if (bank.empty()) throw PreconditionError("linear_refinement: empty bank");
  const double a = bank.front().first.half_width;
  const auto samples = boundary_samples(Box::square(a), samples_per_edge);

  std::vector<Verdict> verdicts(bank.size());
  parallel_for(bank.size(), resolve_thread_count(threads), [&](std::size_t i) {
    verdicts[i] = bound_verdict(compare_counts(f_q, bank[i].second, r_min, r_max), orientation);
  });

  TraceBounds tb;
  tb.orientation = orientation;
  tb.r_min = r_min;
  tb.r_max = r_max;
  const std::size_t ns = samples.size();
  tb.s.resize(ns);
  tb.points.resize(ns);
  tb.q_minus.assign(ns, -init_magnitude);
  tb.q_plus.assign(ns, init_magnitude);
  tb.minus_contributor.assign(ns, -1);
  tb.plus_contributor.assign(ns, -1);
  for (std::size_t k = 0; k < ns; ++k) {
    tb.s[k] = samples[k].first;
    tb.points[k] = samples[k].second;
  }
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const Verdict v = verdicts[i];
    if (v == Verdict::TestAbove) {
      ++tb.accepted_above;
      for (std::size_t k = 0; k < ns; ++k) {
        const double p = bank[i].first.evaluate(tb.points[k]);
        if (p < tb.q_plus[k]) {
          tb.q_plus[k] = p;
          tb.plus_contributor[k] = static_cast<int>(i);
        }
      }
    } else if (v == Verdict::TestBelow) {
      ++tb.accepted_below;
      for (std::size_t k = 0; k < ns; ++k) {
        const double p = bank[i].first.evaluate(tb.points[k]);
        if (p > tb.q_minus[k]) {
          tb.q_minus[k] = p;
          tb.minus_contributor[k] = static_cast<int>(i);
        }
      }
    } else {
      tb.skipped.emplace_back(static_cast<int>(i), v);
    }
  }
  if (tb.accepted_above == 0 && tb.accepted_below == 0) {
    throw NumericalError("linear_refinement: no test contrast accepted on either side");
  }
  return tb;
}

}  // namespace scatterbound
