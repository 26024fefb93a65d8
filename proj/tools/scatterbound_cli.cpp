// Command-line front end: forward synthesis, spectra, shape indicators and
// boundary-value bounds. Exit codes: 0 ok, 2 precondition, 3 numerical, 64 usage.

#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scatterbound/cli_io.hpp"
#include "scatterbound/errors.hpp"
#include "scatterbound/operators.hpp"
#include "scatterbound/spectral.hpp"

namespace fs = std::filesystem;
using namespace scatterbound;
using io::format_double;

namespace {

constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;

struct ContrastOptions {
  std::string file;
  std::string builtin;
};

void add_contrast_options(CLI::App* cmd, ContrastOptions& o, const std::string& what) {
  auto* f = cmd->add_option("--contrast", o.file, what + " contrast as a JSON descriptor file");
  auto* b = cmd->add_option("--builtin", o.builtin, what + " built-in contrast")
                ->check(CLI::IsMember({"qc", "qv", "qv-symmetric", "qr", "sign-demo", "zero"}));
  f->excludes(b);
}

ContrastField builtin_contrast(const std::string& name) {
  if (name == "qc") return builtin_qc();
  if (name == "qv") return builtin_qv(false);
  if (name == "qv-symmetric") return builtin_qv(true);
  if (name == "qr") return builtin_qr();
  if (name == "sign-demo") return sign_changing_demo();
  if (name == "zero") return constant_on_square(0.0);
  throw PreconditionError("unknown built-in contrast '" + name + "'");
}

ContrastField resolve_contrast(const ContrastOptions& o, const char* fallback = nullptr) {
  if (!o.file.empty()) {
    std::ifstream in(o.file);
    if (!in) throw PreconditionError("cannot open contrast file " + o.file);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw PreconditionError("malformed contrast file " + o.file + ": " + e.what());
    }
    return contrast_from_json(j);
  }
  if (!o.builtin.empty()) return builtin_contrast(o.builtin);
  if (fallback) return builtin_contrast(fallback);
  throw PreconditionError("a contrast is required (--contrast FILE or --builtin NAME)");
}

struct ForwardOptions {
  double k = 2.0 * std::numbers::pi;
  int n_dir = 32;
  ForwardConfig config;
};

void add_solver_options(CLI::App* cmd, ForwardConfig& c) {
  cmd->add_option("--grid", c.grid_points, "grid points per dimension (power of two)");
  cmd->add_option("--box-radius", c.box_radius, "half width of the periodization box");
  cmd->add_option("--tol", c.tolerance, "GMRES relative residual tolerance");
  cmd->add_option("--supersample", c.supersample, "midpoints per cell edge for smooth contrasts");
  cmd->add_option("--threads", c.threads, "worker threads (default: SCATTERBOUND_THREADS or all cores)");
}

void add_forward_options(CLI::App* cmd, ForwardOptions& o) {
  cmd->add_option("--k", o.k, "wavenumber");
  cmd->add_option("--n-dir", o.n_dir, "number of directions (even, >= 8)");
  add_solver_options(cmd, o.config);
}

struct Annulus {
  double r_min = 1e-8;
  double r_max = 1e-2;
};

void add_annulus_options(CLI::App* cmd, Annulus& a) {
  cmd->add_option("--rmin", a.r_min, "inner annulus radius");
  cmd->add_option("--rmax", a.r_max, "outer annulus radius");
}

void print_diagnostics(const OperatorDiagnostics& d) {
  std::cout << "unitarity=" << format_double(d.unitarity) << " normality=" << format_double(d.normality)
            << " reciprocity=" << format_double(d.reciprocity) << '\n';
}

void check_compatible(const FarFieldMatrix& data, const FarFieldMatrix& member, const std::string& bank) {
  if (data.ctx.k() != member.ctx.k() || data.size() != member.size()) {
    throw PreconditionError("bank " + bank + " was synthesized for a different k or direction count");
  }
}

// "auto" calibrates from the extreme constant members of a bank; otherwise a
// convention name or a file written by `calibrate`.
io::OrientationRecord resolve_orientation(const std::string& spec, const Annulus& a,
                                          const ConstantBank& constants) {
  if (spec == "auto") {
    if (constants.size() < 2) throw PreconditionError("automatic calibration needs two constant test contrasts");
    auto lo = constants.begin(), hi = constants.begin();
    for (auto it = constants.begin(); it != constants.end(); ++it) {
      if (it->first < lo->first) lo = it;
      if (it->first > hi->first) hi = it;
    }
    const Orientation o =
        io::calibrate_from_constants(hi->second, hi->first, lo->second, lo->first, a.r_min, a.r_max);
    return {o, a.r_min, a.r_max,
            {{"method", "bank"}, {"reference_c", hi->first}, {"probe_c", lo->first}}};
  }
  if (spec == "PlusVanishesBelow" || spec == "MinusVanishesBelow") {
    return {orientation_from_string(spec), a.r_min, a.r_max, {{"method", "explicit"}}};
  }
  io::OrientationRecord rec = io::read_orientation(spec);
  rec.r_min = a.r_min;
  rec.r_max = a.r_max;
  return rec;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::parse_double(item));
  if (out.empty()) throw PreconditionError("empty list '" + s + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scatterbound: inverse medium scattering toolkit"};
  app.require_subcommand(1);
  std::function<void()> run;

  // forward
  ContrastOptions fw_contrast;
  ForwardOptions fw;
  std::string fw_out;
  auto* forward = app.add_subcommand("forward", "synthesize a far field matrix (FFO file)");
  add_contrast_options(forward, fw_contrast, "scatterer");
  add_forward_options(forward, fw);
  forward->add_option("--out", fw_out, "output FFO file")->required();
  forward->callback([&] {
    run = [&] {
      const ContrastField q = resolve_contrast(fw_contrast);
      const FarFieldMatrix f = far_field_matrix(WaveContext(fw.k), q, DirectionSet(fw.n_dir), fw.config);
      io::ffo_write(fw_out, f);
      std::cout << "wrote " << fw_out << " (" << f.contrast_tag() << ")\n";
      print_diagnostics(operator_diagnostics(f));
    };
  });

  // spectrum
  std::string sp_data, sp_against, sp_out;
  Annulus sp_ann;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of F_w or of S_2^H (F_1 - F_2)");
  spectrum->add_option("--data", sp_data, "FFO file")->required();
  spectrum->add_option("--against", sp_against, "second FFO file; selects the comparison operator");
  add_annulus_options(spectrum, sp_ann);
  spectrum->add_option("--out", sp_out, "CSV of eigenvalues");
  spectrum->callback([&] {
    run = [&] {
      const FarFieldMatrix f = io::ffo_read(sp_data);
      Eigen::MatrixXcd a = f.weighted();
      if (!sp_against.empty()) a = comparison_matrix(f, io::ffo_read(sp_against));
      const OperatorSpectrum s = eig_general(a);
      const AnnulusCounts c = annulus_counts(a, sp_ann.r_min, sp_ann.r_max);
      std::cout << "n=" << s.eigenvalues.size() << " max_residual=" << format_double(s.max_residual)
                << " m_plus=" << c.m_plus << " m_minus=" << c.m_minus << '\n';
      if (!sp_out.empty()) {
        std::ofstream out(sp_out);
        if (!out) throw PreconditionError("cannot write " + sp_out);
        out << "# r_min=" << format_double(sp_ann.r_min) << "\n# r_max=" << format_double(sp_ann.r_max) << '\n';
        out << "index,re,im,modulus,residual\n";
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
          out << i << ',' << format_double(s.eigenvalues(i).real()) << ','
              << format_double(s.eigenvalues(i).imag()) << ',' << format_double(std::abs(s.eigenvalues(i)))
              << ',' << format_double(s.residuals[static_cast<std::size_t>(i)]) << '\n';
        }
      }
    };
  });

  // shape-fm / shape-msharp share the sampling options
  struct MapOptions {
    double half_width = 1.2;
    int resolution = 61;
    double alpha = 1e-8;
    std::string csv, pgm;
  };
  auto add_map_options = [](CLI::App* cmd, MapOptions& o) {
    cmd->add_option("--box", o.half_width, "sampling square half width");
    cmd->add_option("--res", o.resolution, "sampling points per dimension");
    cmd->add_option("--alpha", o.alpha, "Tikhonov parameter");
    cmd->add_option("--csv", o.csv, "indicator CSV output");
    cmd->add_option("--pgm", o.pgm, "indicator PGM output");
  };
  auto emit_map = [](const IndicatorMap& m, const MapOptions& o) {
    if (!o.csv.empty()) io::write_indicator_csv(o.csv, m);
    if (!o.pgm.empty()) io::write_indicator_pgm(o.pgm, m);
    double mean = 0.0;
    for (double v : m.values) mean += v;
    std::cout << "points=" << m.values.size() << " mean=" << format_double(mean / m.values.size()) << '\n';
  };

  std::string fm_data;
  MapOptions fm_map;
  auto* shape_fm = app.add_subcommand("shape-fm", "factorization-method support indicator");
  shape_fm->add_option("--data", fm_data, "FFO file")->required();
  add_map_options(shape_fm, fm_map);
  shape_fm->callback([&] {
    run = [&] {
      const FarFieldMatrix f = io::ffo_read(fm_data);
      const SamplingGrid grid(Box::square(fm_map.half_width), fm_map.resolution);
      emit_map(fm_indicator_map(f, grid, fm_map.alpha), fm_map);
    };
  });

  std::string ms_data;
  ContrastOptions ms_background;
  ForwardConfig ms_config;
  MapOptions ms_map;
  ms_map.resolution = 31;
  auto* shape_ms = app.add_subcommand("shape-msharp", "perturbation indicator against a known background");
  shape_ms->add_option("--data", ms_data, "FFO file of the perturbed medium")->required();
  add_contrast_options(shape_ms, ms_background, "background");
  add_solver_options(shape_ms, ms_config);
  add_map_options(shape_ms, ms_map);
  shape_ms->callback([&] {
    run = [&] {
      const FarFieldMatrix f = io::ffo_read(ms_data);
      const ContrastField q2 = resolve_contrast(ms_background);
      const SamplingGrid grid(Box::square(ms_map.half_width), ms_map.resolution);
      emit_map(msharp_indicator_map(f, q2, grid, ms_map.alpha, ms_config), ms_map);
    };
  });

  // bounds
  std::string bd_data, bd_bank, bd_out, bd_orientation = "auto";
  std::optional<double> bd_step, bd_lo, bd_hi;
  Annulus bd_ann;
  auto* bounds = app.add_subcommand("bounds", "constant boundary-value bounds from a constant bank");
  bounds->add_option("--data", bd_data, "FFO file")->required();
  bounds->add_option("--bank", bd_bank, "constant bank directory")->required();
  bounds->add_option("--step", bd_step, "search step (default: bank spacing)");
  bounds->add_option("--c-lo", bd_lo, "lower starting value (default: bank minimum)");
  bounds->add_option("--c-hi", bd_hi, "upper starting value (default: bank maximum)");
  bounds->add_option("--orientation", bd_orientation,
                     "auto, PlusVanishesBelow, MinusVanishesBelow or a calibrate output file");
  add_annulus_options(bounds, bd_ann);
  bounds->add_option("--out", bd_out, "trail CSV");
  bounds->callback([&] {
    run = [&] {
      const FarFieldMatrix f = io::ffo_read(bd_data);
      const ConstantBank bank = io::load_constant_bank(bd_bank);
      if (bank.size() < 2) throw PreconditionError("constant bank needs at least two members");
      check_compatible(f, bank.front().second, bd_bank);
      const auto rec = resolve_orientation(bd_orientation, bd_ann, bank);
      double lo = bank.front().first, hi = bank.front().first;
      for (const auto& [c, m] : bank) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      const double step = bd_step.value_or(std::round((bank[1].first - bank[0].first) * 1e12) / 1e12);
      const BoundsResult r = constant_bound_search(f, bank, std::fabs(step), bd_lo.value_or(lo),
                                                   bd_hi.value_or(hi), rec.orientation, rec.r_min, rec.r_max);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      if (!bd_out.empty()) io::write_bounds_csv(bd_out, r);
      std::cout << "c_lo=" << format_double(r.c_star) << " c_hi=" << format_double(r.c_upper) << '\n';
      std::cout << "orientation=" << to_string(r.orientation) << " r_min=" << format_double(r.r_min)
                << " r_max=" << format_double(r.r_max) << '\n';
    };
  });

  // bounds-linear
  std::string bl_data, bl_bank, bl_out, bl_orientation = "auto";
  Annulus bl_ann;
  int bl_samples = 64;
  double bl_init = 1e3;
  int bl_threads = 0;
  auto* bounds_linear = app.add_subcommand("bounds-linear", "trace bounds from a linear test bank");
  bounds_linear->add_option("--data", bl_data, "FFO file")->required();
  bounds_linear->add_option("--bank", bl_bank, "linear bank directory")->required();
  bounds_linear->add_option("--orientation", bl_orientation,
                            "auto, PlusVanishesBelow, MinusVanishesBelow or a calibrate output file");
  bounds_linear->add_option("--samples-per-edge", bl_samples, "boundary samples per edge");
  bounds_linear->add_option("--init", bl_init, "initial magnitude of q-plus / q-minus");
  bounds_linear->add_option("--threads", bl_threads, "worker threads");
  add_annulus_options(bounds_linear, bl_ann);
  bounds_linear->add_option("--out", bl_out, "trace CSV");
  bounds_linear->callback([&] {
    run = [&] {
      const FarFieldMatrix f = io::ffo_read(bl_data);
      const LinearBank bank = io::load_linear_bank(bl_bank);
      if (bank.empty()) throw PreconditionError("linear bank is empty");
      check_compatible(f, bank.front().second, bl_bank);
      ConstantBank constants;
      for (const auto& [p, m] : bank) {
        if (p.slope != 0.0) continue;
        const bool seen = std::any_of(constants.begin(), constants.end(),
                                      [&](const auto& e) { return e.first == p.offset; });
        if (!seen) constants.emplace_back(p.offset, m);
      }
      const auto rec = resolve_orientation(bl_orientation, bl_ann, constants);
      const TraceBounds t = linear_refinement(f, bank, rec.orientation, bl_init, bl_samples, rec.r_min,
                                              rec.r_max, bl_threads);
      if (!bl_out.empty()) io::write_trace_csv(bl_out, t);
      double gap = 0.0;
      for (std::size_t i = 0; i < t.s.size(); ++i) gap = std::max(gap, t.q_plus[i] - t.q_minus[i]);
      std::cout << "accepted_below=" << t.accepted_below << " accepted_above=" << t.accepted_above
                << " skipped=" << t.skipped.size() << " max_gap=" << format_double(gap) << '\n';
      std::cout << "orientation=" << to_string(t.orientation) << " r_min=" << format_double(t.r_min)
                << " r_max=" << format_double(t.r_max) << '\n';
    };
  });

  // calibrate
  ContrastOptions cal_reference;
  ForwardOptions cal;
  double cal_b = 0.4, cal_probe = 0.0;
  Annulus cal_ann;
  std::string cal_out;
  auto* calibrate = app.add_subcommand("calibrate", "orientation from a reference with known boundary value");
  add_contrast_options(calibrate, cal_reference, "reference (default qc)");
  add_forward_options(calibrate, cal);
  calibrate->add_option("--boundary-value", cal_b, "boundary value of the reference contrast");
  calibrate->add_option("--probe", cal_probe, "constant probe value (must differ from the boundary value)");
  add_annulus_options(calibrate, cal_ann);
  calibrate->add_option("--out", cal_out, "orientation JSON output");
  calibrate->callback([&] {
    run = [&] {
      const ContrastField q = resolve_contrast(cal_reference, "qc");
      const Orientation o = calibrate_orientation(WaveContext(cal.k), DirectionSet(cal.n_dir), cal.config, q,
                                                  cal_b, cal_probe, cal_ann.r_min, cal_ann.r_max);
      const io::OrientationRecord rec{o, cal_ann.r_min, cal_ann.r_max,
                                      {{"method", "reference"},
                                       {"reference", contrast_to_json(q)},
                                       {"boundary_value", cal_b},
                                       {"probe_c", cal_probe},
                                       {"k", cal.k},
                                       {"n_directions", cal.n_dir},
                                       {"grid_points", cal.config.grid_points}}};
      if (!cal_out.empty()) io::write_orientation(cal_out, rec);
      std::cout << "orientation=" << to_string(o) << " r_min=" << format_double(cal_ann.r_min)
                << " r_max=" << format_double(cal_ann.r_max) << '\n';
    };
  });

  // bank
  std::string bank_kind = "constant", bank_dir;
  ForwardOptions bank_fw;
  double bank_cmin = -0.4, bank_cmax = 1.5, bank_cstep = 0.1;
  int bank_points = 12;
  std::string bank_slopes, bank_offsets;
  auto* bank = app.add_subcommand("bank", "synthesize or complete a test-contrast bank");
  bank->add_option("--kind", bank_kind, "constant or linear")->check(CLI::IsMember({"constant", "linear"}));
  bank->add_option("--dir", bank_dir, "bank directory")->required();
  add_forward_options(bank, bank_fw);
  bank->add_option("--c-min", bank_cmin, "smallest constant");
  bank->add_option("--c-max", bank_cmax, "largest constant");
  bank->add_option("--c-step", bank_cstep, "constant spacing");
  bank->add_option("--points", bank_points, "anchor points on the boundary (linear)");
  bank->add_option("--slopes", bank_slopes, "comma-separated slopes (linear; default -2:0.4:2)");
  bank->add_option("--offsets", bank_offsets, "comma-separated offsets (linear; default 0:0.1:1)");
  bank->callback([&] {
    run = [&] {
      const WaveContext ctx(bank_fw.k);
      const DirectionSet dirs(bank_fw.n_dir);
      if (bank_kind == "constant") {
        const auto b = io::ensure_constant_bank(bank_dir, ctx, dirs, bank_fw.config,
                                                uniform_values(bank_cmin, bank_cmax, bank_cstep));
        std::cout << "constant bank with " << b.size() << " members in " << bank_dir << '\n';
      } else {
        const auto slopes = bank_slopes.empty() ? default_slopes() : parse_list(bank_slopes);
        const auto offsets = bank_offsets.empty() ? default_offsets() : parse_list(bank_offsets);
        const auto b = io::ensure_linear_bank(bank_dir, ctx, dirs, bank_fw.config,
                                              linear_test_family(bank_points, slopes, offsets));
        std::cout << "linear bank with " << b.size() << " members in " << bank_dir << '\n';
      }
    };
  });

  // selftest
  ContrastOptions st_contrast;
  ForwardOptions st;
  auto* selftest = app.add_subcommand("selftest", "synthesize and print operator diagnostics");
  add_contrast_options(selftest, st_contrast, "scatterer (default zero)");
  add_forward_options(selftest, st);
  selftest->callback([&] {
    run = [&] {
      const ContrastField q = resolve_contrast(st_contrast, "zero");
      const FarFieldMatrix f = far_field_matrix(WaveContext(st.k), q, DirectionSet(st.n_dir), st.config);
      std::cout << "contrast=" << f.contrast_tag() << '\n';
      print_diagnostics(operator_diagnostics(f));
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (run) run();
    return 0;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
