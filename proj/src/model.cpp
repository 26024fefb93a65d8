#include "scatterbound/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "scatterbound/errors.hpp"

namespace scatterbound {

WaveContext::WaveContext(double k) : k_(k), gamma_sq_(1.0 / (8.0 * std::numbers::pi * k)) {
  if (!(k > 0.0) || !std::isfinite(k)) throw PreconditionError("wavenumber k must be positive");
}

DirectionSet::DirectionSet(int n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    throw PreconditionError("direction count must be even and at least 8");
  }
  dirs_.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    dirs_.push_back({std::cos(t), std::sin(t)});
  }
}

double DirectionSet::weight() const noexcept { return 2.0 * std::numbers::pi / n_; }

Point2 DirectionSet::direction(int j) const {
  if (j < 0 || j >= n_) throw PreconditionError("direction index out of range");
  return dirs_[j];
}

double Box::diameter() const noexcept { return std::hypot(xmax - xmin, ymax - ymin); }

Box Box::square(double half_width, Point2 center) {
  return {center.x - half_width, center.x + half_width, center.y - half_width,
          center.y + half_width};
}

ComputationalGrid::ComputationalGrid(double box_radius, int m) : radius_(box_radius), m_(m) {
  if (!(box_radius > 0.0)) throw PreconditionError("grid box radius must be positive");
  if (m < 4 || (m & (m - 1)) != 0) {
    throw PreconditionError("grid points per dimension must be a power of two");
  }
}

Point2 ComputationalGrid::node(std::size_t index) const noexcept {
  const auto ix = static_cast<int>(index % m_);
  const auto iy = static_cast<int>(index / m_);
  return {coordinate(ix), coordinate(iy)};
}

bool ComputationalGrid::fits(const Box& s) const noexcept {
  const double half = radius_ / 2.0;
  return s.xmin >= -half && s.xmax <= half && s.ymin >= -half && s.ymax <= half &&
         s.diameter() <= radius_ * (1.0 + 1e-12);
}

// --- evaluation --------------------------------------------------------------

namespace {

bool in_square(Point2 p, double a, Point2 c = {}) {
  return std::fabs(p.x - c.x) <= a && std::fabs(p.y - c.y) <= a;
}

Box support_of(const ContrastDescriptor& d);

struct SupportVisitor {
  Box operator()(const ConstantOnSquare& c) const { return Box::square(c.half_width, c.center); }
  Box operator()(const BuiltinQv&) const { return Box::square(kDefaultHalfWidth); }
  Box operator()(const BuiltinQr&) const { return Box::square(kDefaultHalfWidth); }
  Box operator()(const LinearOnSquare& l) const { return Box::square(l.half_width); }
  Box operator()(const SignChangingDemo&) const { return Box::square(kDefaultHalfWidth); }
  Box operator()(const Tabulated& t) const {
    return {t.origin.x, t.origin.x + (t.nx - 1) * t.spacing, t.origin.y,
            t.origin.y + (t.ny - 1) * t.spacing};
  }
  Box operator()(const Sum& s) const {
    if (s.terms.empty()) return {};
    Box b = s.terms.front().contrast->support_box();
    for (const auto& t : s.terms) {
      const Box& o = t.contrast->support_box();
      b.xmin = std::min(b.xmin, o.xmin);
      b.xmax = std::max(b.xmax, o.xmax);
      b.ymin = std::min(b.ymin, o.ymin);
      b.ymax = std::max(b.ymax, o.ymax);
    }
    return b;
  }
};

Box support_of(const ContrastDescriptor& d) { return std::visit(SupportVisitor{}, d); }

double eval_qv(Point2 p, bool symmetric) {
  const double a = kDefaultHalfWidth;
  const double inner1 = symmetric ? std::min(p.x - a, -p.x - a) : std::min(p.x - a, -p.x) - a;
  const double inner2 = std::min(p.y - a, -p.y - a);
  return 0.4 * std::fabs(std::min(inner1, inner2));
}

double eval_qr(Point2 p) {
  const double a = kDefaultHalfWidth;
  const double m = std::min(std::min(p.x - a, -p.x - a), std::min(p.y - a, -p.y - a));
  return 0.4 * m + 1.0;
}

double eval_tabulated(const Tabulated& t, Point2 p) {
  const double fx = (p.x - t.origin.x) / t.spacing;
  const double fy = (p.y - t.origin.y) / t.spacing;
  const double eps = 1e-12;
  if (!(fx >= -eps && fy >= -eps && fx <= t.nx - 1 + eps && fy <= t.ny - 1 + eps)) {
    throw PreconditionError("tabulated contrast: point out of tabulation range");
  }
  const int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, t.nx - 2);
  const int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, t.ny - 2);
  const double tx = std::clamp(fx - ix, 0.0, 1.0);
  const double ty = std::clamp(fy - iy, 0.0, 1.0);
  auto at = [&](int i, int j) { return t.values[static_cast<std::size_t>(j) * t.nx + i]; };
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
         (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

struct EvalVisitor {
  Point2 p;
  double operator()(const ConstantOnSquare& c) const {
    return in_square(p, c.half_width, c.center) ? c.value : 0.0;
  }
  double operator()(const BuiltinQv& v) const {
    return in_square(p, kDefaultHalfWidth) ? eval_qv(p, v.symmetric) : 0.0;
  }
  double operator()(const BuiltinQr&) const {
    return in_square(p, kDefaultHalfWidth) ? eval_qr(p) : 0.0;
  }
  double operator()(const LinearOnSquare& l) const {
    if (!in_square(p, l.half_width)) return 0.0;
    const double r = std::hypot(l.anchor.x, l.anchor.y);
    const Point2 xhat{l.anchor.x / r, l.anchor.y / r};
    return l.slope * dot(xhat, {p.x - l.anchor.x, p.y - l.anchor.y}) + l.offset;
  }
  double operator()(const SignChangingDemo&) const {
    double v = in_square(p, kDefaultHalfWidth) ? 0.7 : 0.0;
    if (in_square(p, kDefaultHalfWidth / 2)) v -= 1.2;
    return v;
  }
  double operator()(const Tabulated& t) const { return eval_tabulated(t, p); }
  double operator()(const Sum& s) const {
    double v = 0.0;
    for (const auto& t : s.terms) v += t.weight * t.contrast->evaluate(p);
    return v;
  }
};

void validate(const ContrastDescriptor& d) {
  if (const auto* c = std::get_if<ConstantOnSquare>(&d)) {
    if (!(c->half_width > 0) || !std::isfinite(c->value)) {
      throw PreconditionError("constant_on_square: invalid parameters");
    }
  } else if (const auto* l = std::get_if<LinearOnSquare>(&d)) {
    if (!(l->half_width > 0) || std::hypot(l->anchor.x, l->anchor.y) == 0.0) {
      throw PreconditionError("linear_on_square: anchor must be nonzero, half width positive");
    }
  } else if (const auto* t = std::get_if<Tabulated>(&d)) {
    if (t->nx < 2 || t->ny < 2 || !(t->spacing > 0) ||
        t->values.size() != static_cast<std::size_t>(t->nx) * t->ny) {
      throw PreconditionError("tabulated: inconsistent grid description");
    }
    for (double v : t->values) {
      if (!std::isfinite(v)) throw PreconditionError("tabulated: non-finite value");
    }
  } else if (const auto* s = std::get_if<Sum>(&d)) {
    for (const auto& t : s->terms) {
      if (!t.contrast) throw PreconditionError("sum: null term");
    }
  }
}

}  // namespace

ContrastField::ContrastField(ContrastDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  validate(descriptor_);
  support_ = support_of(descriptor_);
}

double ContrastField::evaluate(Point2 p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw PreconditionError("contrast evaluation requires finite points");
  }
  if (!std::holds_alternative<Tabulated>(descriptor_) && !support_.contains(p)) return 0.0;
  return std::visit(EvalVisitor{p}, descriptor_);
}

std::vector<double> ContrastField::evaluate(std::span<const Point2> points) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(evaluate(p));
  return out;
}

namespace {

double overlap_fraction(const Box& cell, const Box& b, Box& inter) {
  inter = {std::max(cell.xmin, b.xmin), std::min(cell.xmax, b.xmax), std::max(cell.ymin, b.ymin),
           std::min(cell.ymax, b.ymax)};
  const double w = inter.xmax - inter.xmin, hgt = inter.ymax - inter.ymin;
  if (w <= 0 || hgt <= 0) return 0.0;
  return (w * hgt) / ((cell.xmax - cell.xmin) * (cell.ymax - cell.ymin));
}

// Midpoint average of f over a rectangle with n x n subcells.
template <class F>
double midpoint_average(const Box& r, int n, F&& f) {
  const double dx = (r.xmax - r.xmin) / n, dy = (r.ymax - r.ymin) / n;
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) acc += f(Point2{r.xmin + (i + 0.5) * dx, r.ymin + (j + 0.5) * dy});
  }
  return acc / (static_cast<double>(n) * n);
}

struct CellAverageVisitor {
  const Box& cell;
  const Box& support;
  int n;

  double smooth_part(const ContrastDescriptor& d) const {
    Box inter;
    const double frac = overlap_fraction(cell, support, inter);
    if (frac == 0.0) return 0.0;
    return frac * midpoint_average(inter, n, [&](Point2 p) { return std::visit(EvalVisitor{p}, d); });
  }
  double operator()(const ConstantOnSquare& c) const {
    Box inter;
    return c.value * overlap_fraction(cell, Box::square(c.half_width, c.center), inter);
  }
  double operator()(const BuiltinQv& v) const { return smooth_part(v); }
  double operator()(const BuiltinQr& r) const { return smooth_part(r); }
  double operator()(const LinearOnSquare& l) const { return smooth_part(l); }
  double operator()(const SignChangingDemo&) const {
    Box inter;
    return 0.7 * overlap_fraction(cell, Box::square(kDefaultHalfWidth), inter) -
           1.2 * overlap_fraction(cell, Box::square(kDefaultHalfWidth / 2), inter);
  }
  double operator()(const Tabulated& t) const { return smooth_part(t); }
  double operator()(const Sum& s) const {
    double v = 0.0;
    for (const auto& t : s.terms) v += t.weight * t.contrast->cell_average(cell, n);
    return v;
  }
};

}  // namespace

double ContrastField::cell_average(const Box& cell, int supersample) const {
  if (supersample < 1) throw PreconditionError("supersample factor must be at least 1");
  return std::visit(CellAverageVisitor{cell, support_, supersample}, descriptor_);
}

std::vector<double> ContrastField::sample(const ComputationalGrid& grid, int supersample) const {
  if (supersample < 1) throw PreconditionError("supersample factor must be at least 1");
  const int m = grid.points_per_dim();
  const double h = grid.spacing();
  std::vector<double> out(grid.size(), 0.0);
  for (int iy = 0; iy < m; ++iy) {
    const double y = grid.coordinate(iy);
    if (y + h / 2 <= support_.ymin || y - h / 2 >= support_.ymax) continue;
    for (int ix = 0; ix < m; ++ix) {
      const double x = grid.coordinate(ix);
      if (x + h / 2 <= support_.xmin || x - h / 2 >= support_.xmax) continue;
      const Box cell{x - h / 2, x + h / 2, y - h / 2, y + h / 2};
      out[static_cast<std::size_t>(iy) * m + ix] = cell_average(cell, supersample);
    }
  }
  return out;
}

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct TagVisitor {
  std::string operator()(const ConstantOnSquare& c) const {
    std::string s = "constant_on_square(" + fmt_num(c.value) + ", a=" + fmt_num(c.half_width);
    if (c.center.x != 0 || c.center.y != 0) {
      s += ", center=(" + fmt_num(c.center.x) + "," + fmt_num(c.center.y) + ")";
    }
    return s + ")";
  }
  std::string operator()(const BuiltinQv& v) const {
    return v.symmetric ? "builtin_qv(symmetric)" : "builtin_qv";
  }
  std::string operator()(const BuiltinQr&) const { return "builtin_qr"; }
  std::string operator()(const LinearOnSquare& l) const {
    return "linear_on_square(anchor=(" + fmt_num(l.anchor.x) + "," + fmt_num(l.anchor.y) +
           "), s=" + fmt_num(l.slope) + ", o=" + fmt_num(l.offset) + ")";
  }
  std::string operator()(const SignChangingDemo&) const { return "sign_changing_demo"; }
  std::string operator()(const Tabulated& t) const {
    return "tabulated(" + std::to_string(t.nx) + "x" + std::to_string(t.ny) + ")";
  }
  std::string operator()(const Sum& s) const {
    std::string out = "sum(";
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
      if (i) out += " + ";
      out += fmt_num(s.terms[i].weight) + "*" + s.terms[i].contrast->tag();
    }
    return out + ")";
  }
};

}  // namespace

std::string ContrastField::tag() const { return std::visit(TagVisitor{}, descriptor_); }

bool ContrastField::is_zero() const {
  if (const auto* c = std::get_if<ConstantOnSquare>(&descriptor_)) return c->value == 0.0;
  if (const auto* l = std::get_if<LinearOnSquare>(&descriptor_)) {
    return l->slope == 0.0 && l->offset == 0.0;
  }
  if (const auto* t = std::get_if<Tabulated>(&descriptor_)) {
    return std::all_of(t->values.begin(), t->values.end(), [](double v) { return v == 0.0; });
  }
  if (const auto* s = std::get_if<Sum>(&descriptor_)) {
    return std::all_of(s->terms.begin(), s->terms.end(), [](const WeightedContrast& t) {
      return t.weight == 0.0 || t.contrast->is_zero();
    });
  }
  return false;
}

bool operator==(const ContrastField& a, const ContrastField& b) {
  return contrast_to_json(a) == contrast_to_json(b);
}

// --- built-ins ---------------------------------------------------------------

ContrastField constant_on_square(double value, double half_width, Point2 center) {
  return ContrastField(ConstantOnSquare{value, half_width, center});
}
ContrastField builtin_qc() { return constant_on_square(0.4); }
ContrastField builtin_qv(bool symmetric) { return ContrastField(BuiltinQv{symmetric}); }
ContrastField builtin_qr() { return ContrastField(BuiltinQr{}); }
ContrastField sign_changing_demo() { return ContrastField(SignChangingDemo{}); }
ContrastField linear_on_square(Point2 anchor, double slope, double offset, double half_width) {
  return ContrastField(LinearOnSquare{anchor, slope, offset, half_width});
}
ContrastField scaled(const ContrastField& q, double factor) {
  return sum({{factor, q}});
}
ContrastField sum(const std::vector<std::pair<double, ContrastField>>& terms) {
  Sum s;
  for (const auto& [w, q] : terms) {
    s.terms.push_back({w, std::make_shared<const ContrastField>(q)});
  }
  return ContrastField(std::move(s));
}

// --- JSON --------------------------------------------------------------------

namespace {

nlohmann::json point_json(Point2 p) { return nlohmann::json::array({p.x, p.y}); }

Point2 point_from(const nlohmann::json& j, const char* field) {
  const auto& a = j.at(field);
  if (!a.is_array() || a.size() != 2) {
    throw PreconditionError(std::string("contrast JSON: field '") + field +
                            "' must be a 2-element array");
  }
  return {a[0].get<double>(), a[1].get<double>()};
}

struct JsonVisitor {
  nlohmann::json operator()(const ConstantOnSquare& c) const {
    return {{"type", "constant_on_square"},
            {"value", c.value},
            {"half_width", c.half_width},
            {"center", point_json(c.center)}};
  }
  nlohmann::json operator()(const BuiltinQv& v) const {
    return {{"type", "builtin_qv"}, {"symmetric", v.symmetric}};
  }
  nlohmann::json operator()(const BuiltinQr&) const { return {{"type", "builtin_qr"}}; }
  nlohmann::json operator()(const LinearOnSquare& l) const {
    return {{"type", "linear_on_square"},
            {"anchor", point_json(l.anchor)},
            {"slope", l.slope},
            {"offset", l.offset},
            {"half_width", l.half_width}};
  }
  nlohmann::json operator()(const SignChangingDemo&) const {
    return {{"type", "sign_changing_demo"}};
  }
  nlohmann::json operator()(const Tabulated& t) const {
    return {{"type", "tabulated"},      {"origin", point_json(t.origin)}, {"spacing", t.spacing},
            {"nx", t.nx},               {"ny", t.ny},                     {"values", t.values}};
  }
  nlohmann::json operator()(const Sum& s) const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : s.terms) {
      terms.push_back({{"weight", t.weight}, {"contrast", contrast_to_json(*t.contrast)}});
    }
    return {{"type", "sum"}, {"terms", terms}};
  }
};

}  // namespace

nlohmann::json contrast_to_json(const ContrastField& q) {
  return std::visit(JsonVisitor{}, q.descriptor());
}

ContrastField contrast_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant_on_square") {
      ConstantOnSquare c{j.at("value").get<double>(), j.value("half_width", kDefaultHalfWidth)};
      if (j.contains("center")) c.center = point_from(j, "center");
      return ContrastField(c);
    }
    if (type == "builtin_qc") return builtin_qc();
    if (type == "builtin_qv") return builtin_qv(j.value("symmetric", false));
    if (type == "builtin_qr") return builtin_qr();
    if (type == "sign_changing_demo") return sign_changing_demo();
    if (type == "linear_on_square") {
      return linear_on_square(point_from(j, "anchor"), j.at("slope").get<double>(),
                              j.at("offset").get<double>(),
                              j.value("half_width", kDefaultHalfWidth));
    }
    if (type == "tabulated") {
      Tabulated t;
      t.origin = point_from(j, "origin");
      t.spacing = j.at("spacing").get<double>();
      t.nx = j.at("nx").get<int>();
      t.ny = j.at("ny").get<int>();
      t.values = j.at("values").get<std::vector<double>>();
      return ContrastField(std::move(t));
    }
    if (type == "sum") {
      std::vector<std::pair<double, ContrastField>> terms;
      for (const auto& t : j.at("terms")) {
        terms.emplace_back(t.at("weight").get<double>(), contrast_from_json(t.at("contrast")));
      }
      return sum(terms);
    }
    throw PreconditionError("contrast JSON: unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("contrast JSON: ") + e.what());
  }
}

}  // namespace scatterbound
