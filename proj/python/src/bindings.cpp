#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "scatterbound/cli_io.hpp"
#include "scatterbound/errors.hpp"
#include "scatterbound/inversion_bounds.hpp"
#include "scatterbound/inversion_fm.hpp"
#include "scatterbound/operators.hpp"
#include "scatterbound/spectral.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace scatterbound;

namespace {

ContrastField builtin(const std::string& name) {
  if (name == "qc") return builtin_qc();
  if (name == "qv") return builtin_qv();
  if (name == "qv-symmetric") return builtin_qv(true);
  if (name == "qr") return builtin_qr();
  if (name == "sign-demo") return sign_changing_demo();
  if (name == "zero") return constant_on_square(0.0);
  throw PreconditionError("unknown built-in contrast '" + name + "'");
}

py::dict counts_dict(const AnnulusCounts& c) {
  return py::dict("m_plus"_a = c.m_plus, "m_minus"_a = c.m_minus, "r_min"_a = c.r_min,
                  "r_max"_a = c.r_max);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2D inverse medium scattering: forward far fields, spectral tests and trace bounds";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<ContrastField>(m, "Contrast")
      .def_static("builtin", &builtin, "name"_a, "qc, qv, qv-symmetric, qr, sign-demo or zero")
      .def_static("constant", [](double v, double a) { return constant_on_square(v, a); }, "value"_a,
                  "half_width"_a = kDefaultHalfWidth)
      .def_static("linear",
                  [](std::pair<double, double> anchor, double slope, double offset, double a) {
                    return linear_on_square({anchor.first, anchor.second}, slope, offset, a);
                  },
                  "anchor"_a, "slope"_a, "offset"_a, "half_width"_a = kDefaultHalfWidth)
      .def_static("from_json", [](const std::string& s) { return contrast_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const ContrastField& q) { return contrast_to_json(q).dump(); })
      .def("__call__", [](const ContrastField& q, double x, double y) { return q.evaluate({x, y}); }, "x"_a, "y"_a)
      .def("scaled", [](const ContrastField& q, double f) { return scaled(q, f); }, "factor"_a)
      .def_property_readonly("tag", &ContrastField::tag)
      .def("__repr__", [](const ContrastField& q) { return "<Contrast " + q.tag() + ">"; });

  py::class_<ForwardConfig>(m, "ForwardConfig")
      .def(py::init<>())
      .def_readwrite("box_radius", &ForwardConfig::box_radius)
      .def_readwrite("grid_points", &ForwardConfig::grid_points)
      .def_readwrite("tolerance", &ForwardConfig::tolerance)
      .def_readwrite("supersample", &ForwardConfig::supersample)
      .def_readwrite("restart", &ForwardConfig::restart)
      .def_readwrite("max_iterations", &ForwardConfig::max_iterations)
      .def_readwrite("threads", &ForwardConfig::threads);

  py::class_<FarFieldMatrix>(m, "FarFieldMatrix")
      .def(py::init([](double k, const Eigen::MatrixXcd& u) {
             return FarFieldMatrix(WaveContext(k), DirectionSet(static_cast<int>(u.rows())), u);
           }),
           "k"_a, "kernel"_a)
      .def_property_readonly("k", [](const FarFieldMatrix& f) { return f.ctx.k(); })
      .def_property_readonly("n", &FarFieldMatrix::size)
      .def_readonly("kernel", &FarFieldMatrix::kernel)
      .def("weighted", &FarFieldMatrix::weighted)
      .def_property_readonly("contrast", [](const FarFieldMatrix& f) { return f.contrast; });

  m.def("far_field_matrix",
        [](double k, const ContrastField& q, int n, const ForwardConfig& config) {
          py::gil_scoped_release release;
          return far_field_matrix(WaveContext(k), q, DirectionSet(n), config);
        },
        "k"_a, "contrast"_a, "n_directions"_a, "config"_a = ForwardConfig{});

  m.def("read_ffo", &io::ffo_read, "path"_a);
  m.def("write_ffo", &io::ffo_write, "path"_a, "far_field"_a);

  m.def("operator_diagnostics", [](const FarFieldMatrix& f) {
    const auto d = operator_diagnostics(f);
    return py::dict("unitarity"_a = d.unitarity, "normality"_a = d.normality, "reciprocity"_a = d.reciprocity,
                    "reciprocity_relative"_a = d.reciprocity_relative);
  });
  m.def("scattering_matrix", [](const FarFieldMatrix& f) { return scattering_matrix(f).s; });
  m.def("comparison_matrix", &comparison_matrix, "f1"_a, "f2"_a);
  m.def("msharp_matrix", &msharp_matrix, "m"_a, "clip_tolerance"_a = 1e-12);

  m.def("eig_general", [](const Eigen::MatrixXcd& a) {
    const auto s = eig_general(a);
    return py::make_tuple(s.eigenvalues, s.eigenvectors);
  });
  m.def("annulus_counts", [](const Eigen::MatrixXcd& a, double r_min, double r_max) {
    return counts_dict(annulus_counts(a, r_min, r_max));
  }, "a"_a, "r_min"_a = 1e-8, "r_max"_a = 1e-2);

  m.def("calibrate_orientation",
        [](const FarFieldMatrix& ref, double b, const FarFieldMatrix& probe, double c, double r_min, double r_max) {
          return to_string(calibrate_orientation(ref, b, probe, c, r_min, r_max));
        },
        "reference"_a, "boundary_value"_a, "probe"_a, "probe_value"_a, "r_min"_a = 1e-8, "r_max"_a = 1e-2);

  m.def("load_constant_bank", [](const std::filesystem::path& dir) { return io::load_constant_bank(dir); }, "dir"_a);

  m.def("constant_bound_search",
        [](const FarFieldMatrix& f, const ConstantBank& bank, double step, double c_lo, double c_hi,
           const std::string& orientation, double r_min, double r_max) {
          const auto r = constant_bound_search(f, bank, step, c_lo, c_hi, orientation_from_string(orientation),
                                               r_min, r_max);
          py::list trail;
          for (const auto& e : r.trail) {
            trail.append(py::dict("c"_a = e.c, "m_plus"_a = e.counts.m_plus, "m_minus"_a = e.counts.m_minus,
                                  "verdict"_a = to_string(e.verdict)));
          }
          return py::dict("c_star"_a = r.c_star, "c_upper"_a = r.c_upper, "trail"_a = trail,
                          "warnings"_a = r.warnings, "orientation"_a = to_string(r.orientation),
                          "r_min"_a = r.r_min, "r_max"_a = r.r_max);
        },
        "far_field"_a, "bank"_a, "step"_a, "c_lo"_a, "c_hi"_a, "orientation"_a, "r_min"_a = 1e-8,
        "r_max"_a = 1e-2);

  m.def("boundary_trace", [](const ContrastField& q, int n_per_edge) {
    py::list out;
    for (const auto& s : boundary_trace(q, n_per_edge)) out.append(py::make_tuple(s.s, s.point.x, s.point.y, s.value));
    return out;
  }, "contrast"_a, "n_per_edge"_a = 64);

  m.def("fm_indicator",
        [](const FarFieldMatrix& f, double half_width, int resolution, double alpha) {
          const auto map = fm_indicator_map(f, SamplingGrid(Box::square(half_width), resolution), alpha);
          py::array_t<double> out({resolution, resolution});
          std::copy(map.values.begin(), map.values.end(), out.mutable_data());
          return out;
        },
        "far_field"_a, "half_width"_a = 1.2, "resolution"_a = 61, "alpha"_a = 1e-8,
        "indicator on a square grid; row index is y, column index is x");
}
