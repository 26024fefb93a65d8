#include "scatterbound/cli_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "scatterbound/errors.hpp"

namespace scatterbound::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    throw PreconditionError("not a number: '" + s + "'");
  }
  return v;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out << text;
  if (!out) throw PreconditionError("write failed for " + path.string());
}

[[noreturn]] void parse_fail(const std::string& source, int line, const std::string& field,
                             const std::string& msg) {
  throw PreconditionError("ffo parse error: " + source + ":" + std::to_string(line) + ": field '" +
                          field + "': " + msg);
}

}  // namespace

std::string ffo_serialize(const FarFieldMatrix& f) {
  std::ostringstream os;
  os << kFfoFormat << '\n';
  os << "k " << format_double(f.ctx.k()) << '\n';
  os << "n_directions " << f.size() << '\n';
  os << "convention.farfield " << kFarfieldConvention << '\n';
  os << "convention.gamma_sq " << kGammaConvention << '\n';
  os << "convention.weight " << kWeightConvention << '\n';
  os << "contrast " << (f.contrast ? contrast_to_json(*f.contrast).dump() : "null") << '\n';
  os << "kernel\n";
  for (int i = 0; i < f.size(); ++i) {
    for (int j = 0; j < f.size(); ++j) {
      const cdouble v = f.kernel(i, j);
      os << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
    }
  }
  os << "end\n";
  return os.str();
}

FarFieldMatrix ffo_parse(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next = [&](const std::string& field) {
    if (!std::getline(in, line)) parse_fail(source, lineno + 1, field, "unexpected end of file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  auto keyed = [&](const std::string& key) {
    const std::string l = next(key);
    const auto sp = l.find(' ');
    if (sp == std::string::npos || l.substr(0, sp) != key) {
      parse_fail(source, lineno, key, "expected '" + key + " <value>', got '" + l + "'");
    }
    return l.substr(sp + 1);
  };

  if (next("format") != kFfoFormat) {
    parse_fail(source, lineno, "format", "expected '" + std::string(kFfoFormat) + "'");
  }
  double k = 0.0;
  try {
    k = parse_double(keyed("k"));
  } catch (const PreconditionError& e) {
    parse_fail(source, lineno, "k", e.what());
  }
  int n = 0;
  {
    const std::string s = keyed("n_directions");
    const auto r = std::from_chars(s.data(), s.data() + s.size(), n);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      parse_fail(source, lineno, "n_directions", "not an integer: '" + s + "'");
    }
  }
  const std::pair<const char*, const char*> conventions[] = {
      {"convention.farfield", kFarfieldConvention},
      {"convention.gamma_sq", kGammaConvention},
      {"convention.weight", kWeightConvention}};
  for (const auto& [key, expected] : conventions) {
    const std::string got = keyed(key);
    if (got != expected) {
      throw PreconditionError("convention mismatch in " + source + ":" + std::to_string(lineno) +
                              ": " + key + " is '" + got + "', expected '" + expected + "'");
    }
  }
  std::optional<ContrastField> contrast;
  {
    const std::string s = keyed("contrast");
    if (s != "null") {
      try {
        contrast = contrast_from_json(json::parse(s));
      } catch (const std::exception& e) {
        parse_fail(source, lineno, "contrast", e.what());
      }
    }
  }
  std::optional<WaveContext> ctx;
  std::optional<DirectionSet> dirs;
  try {
    ctx.emplace(k);
    dirs.emplace(n);
  } catch (const PreconditionError& e) {
    parse_fail(source, lineno, "header", e.what());
  }
  if (next("kernel") != "kernel") parse_fail(source, lineno, "kernel", "expected 'kernel'");
  Eigen::MatrixXcd u(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::string field = "kernel[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      const std::string l = next(field);
      const auto sp = l.find(' ');
      if (sp == std::string::npos) parse_fail(source, lineno, field, "expected '<re> <im>'");
      try {
        u(i, j) = {parse_double(l.substr(0, sp)), parse_double(l.substr(sp + 1))};
      } catch (const PreconditionError& e) {
        parse_fail(source, lineno, field, e.what());
      }
    }
  }
  if (next("end") != "end") parse_fail(source, lineno, "end", "expected 'end'");
  return FarFieldMatrix(*ctx, *dirs, std::move(u), std::move(contrast));
}

void ffo_write(const fs::path& path, const FarFieldMatrix& f) { write_file(path, ffo_serialize(f)); }

FarFieldMatrix ffo_read(const fs::path& path) { return ffo_parse(read_file(path), path.string()); }

std::string file_checksum(const fs::path& path) {
  const std::string data = read_file(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("checksum computation failed for " + path.string());
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return "sha256:" + os.str();
}

// --- banks ------------------------------------------------------------------------

BankSettings BankSettings::from(const WaveContext& ctx, const DirectionSet& dirs,
                                const ForwardConfig& c) {
  return {ctx.k(), dirs.size(), c.box_radius, c.grid_points, c.tolerance, c.supersample};
}

namespace {

json settings_to_json(const BankSettings& s) {
  return {{"k", s.k},
          {"n_directions", s.n_directions},
          {"box_radius", s.box_radius},
          {"grid_points", s.grid_points},
          {"tolerance", s.tolerance},
          {"supersample", s.supersample}};
}

BankSettings settings_from_json(const json& j) {
  BankSettings s;
  s.k = j.at("k").get<double>();
  s.n_directions = j.at("n_directions").get<int>();
  s.box_radius = j.at("box_radius").get<double>();
  s.grid_points = j.at("grid_points").get<int>();
  s.tolerance = j.at("tolerance").get<double>();
  s.supersample = j.at("supersample").get<int>();
  return s;
}

json linear_parameters(const LinearContrast& p) {
  return {{"anchor", {p.anchor.x, p.anchor.y}},
          {"slope", p.slope},
          {"offset", p.offset},
          {"half_width", p.half_width}};
}

LinearContrast linear_from_parameters(const json& j) {
  LinearContrast p;
  p.anchor = {j.at("anchor").at(0).get<double>(), j.at("anchor").at(1).get<double>()};
  p.slope = j.at("slope").get<double>();
  p.offset = j.at("offset").get<double>();
  p.half_width = j.at("half_width").get<double>();
  return p;
}

FarFieldMatrix load_entry(const fs::path& dir, const BankEntry& e) {
  const fs::path file = dir / e.file;
  const std::string sum = file_checksum(file);
  if (sum != e.checksum) {
    throw PreconditionError("bank checksum mismatch for " + file.string() + " (manifest " +
                            e.checksum + ", file " + sum + ")");
  }
  return ffo_read(file);
}

std::string entry_name(const char* prefix, std::size_t i) {
  std::ostringstream os;
  os << prefix << std::setw(4) << std::setfill('0') << i << ".ffo";
  return os.str();
}

BankEntry store_entry(const fs::path& dir, const std::string& name, const FarFieldMatrix& f,
                      json parameters) {
  ffo_write(dir / name, f);
  return {std::move(parameters), f.contrast ? contrast_to_json(*f.contrast) : json(nullptr), name,
          file_checksum(dir / name)};
}

// Generic incremental synthesis: entries already present with matching
// parameters (and valid checksums) are reused; the manifest is rewritten after
// every new member so an interrupted run resumes where it stopped.
template <class Param, class MakeParams, class MakeContrast>
std::vector<std::pair<Param, FarFieldMatrix>> ensure_bank(
    const fs::path& dir, const char* kind, const char* prefix, const WaveContext& ctx,
    const DirectionSet& dirs, const ForwardConfig& config, const std::vector<Param>& members,
    MakeParams make_params, MakeContrast make_contrast) {
  const BankSettings settings = BankSettings::from(ctx, dirs, config);
  BankManifest manifest{kind, settings, {}};
  std::vector<BankEntry> previous;
  if (fs::exists(dir / kManifestName)) {
    try {
      BankManifest old = read_manifest(dir);
      if (old.kind == kind && old.settings == settings) previous = std::move(old.entries);
    } catch (const std::exception&) {
      previous.clear();
    }
  }
  std::vector<std::pair<Param, FarFieldMatrix>> bank;
  bank.reserve(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const json params = make_params(members[i]);
    if (i < previous.size() && previous[i].parameters == params) {
      try {
        bank.emplace_back(members[i], load_entry(dir, previous[i]));
        manifest.entries.push_back(previous[i]);
        continue;
      } catch (const PreconditionError&) {
        // stale or corrupted entry; recompute below
      }
    }
    FarFieldMatrix f = far_field_matrix(ctx, make_contrast(members[i]), dirs, config);
    manifest.entries.push_back(store_entry(dir, entry_name(prefix, i), f, params));
    bank.emplace_back(members[i], std::move(f));
    write_manifest(dir, manifest);
  }
  write_manifest(dir, manifest);
  return bank;
}

}  // namespace

void write_manifest(const fs::path& dir, const BankManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"parameters", e.parameters},
                       {"contrast", e.contrast},
                       {"file", e.file},
                       {"checksum", e.checksum}});
  }
  const json j = {{"format", "bank-v1"},
                  {"kind", m.kind},
                  {"settings", settings_to_json(m.settings)},
                  {"entries", entries}};
  fs::create_directories(dir);
  const fs::path tmp = dir / (std::string(kManifestName) + ".tmp");
  write_file(tmp, j.dump(1) + "\n");
  fs::rename(tmp, dir / kManifestName);
}

BankManifest read_manifest(const fs::path& dir) {
  json j;
  try {
    j = json::parse(read_file(dir / kManifestName));
  } catch (const json::exception& e) {
    throw PreconditionError("malformed bank manifest in " + dir.string() + ": " + e.what());
  }
  try {
    if (j.at("format") != "bank-v1") throw PreconditionError("unsupported bank format");
    BankManifest m;
    m.kind = j.at("kind").get<std::string>();
    m.settings = settings_from_json(j.at("settings"));
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("parameters"), e.at("contrast"), e.at("file").get<std::string>(),
                           e.at("checksum").get<std::string>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw PreconditionError("malformed bank manifest in " + dir.string() + ": " + e.what());
  }
}

BankManifest write_constant_bank(const fs::path& dir, const ConstantBank& bank,
                                 const BankSettings& settings) {
  BankManifest m{"constant", settings, {}};
  for (std::size_t i = 0; i < bank.size(); ++i) {
    m.entries.push_back(store_entry(dir, entry_name("c_", i), bank[i].second, {{"c", bank[i].first}}));
  }
  write_manifest(dir, m);
  return m;
}

BankManifest write_linear_bank(const fs::path& dir, const LinearBank& bank,
                               const BankSettings& settings) {
  BankManifest m{"linear", settings, {}};
  for (std::size_t i = 0; i < bank.size(); ++i) {
    m.entries.push_back(
        store_entry(dir, entry_name("p_", i), bank[i].second, linear_parameters(bank[i].first)));
  }
  write_manifest(dir, m);
  return m;
}

ConstantBank load_constant_bank(const fs::path& dir, BankSettings* settings) {
  const BankManifest m = read_manifest(dir);
  if (m.kind != "constant") throw PreconditionError(dir.string() + " is not a constant bank");
  if (settings) *settings = m.settings;
  ConstantBank bank;
  for (const auto& e : m.entries) bank.emplace_back(e.parameters.at("c").get<double>(), load_entry(dir, e));
  return bank;
}

LinearBank load_linear_bank(const fs::path& dir, BankSettings* settings) {
  const BankManifest m = read_manifest(dir);
  if (m.kind != "linear") throw PreconditionError(dir.string() + " is not a linear bank");
  if (settings) *settings = m.settings;
  LinearBank bank;
  for (const auto& e : m.entries) bank.emplace_back(linear_from_parameters(e.parameters), load_entry(dir, e));
  return bank;
}

ConstantBank ensure_constant_bank(const fs::path& dir, const WaveContext& ctx,
                                  const DirectionSet& dirs, const ForwardConfig& config,
                                  const std::vector<double>& values) {
  return ensure_bank<double>(
      dir, "constant", "c_", ctx, dirs, config, values, [](double c) { return json{{"c", c}}; },
      [](double c) { return constant_on_square(c); });
}

LinearBank ensure_linear_bank(const fs::path& dir, const WaveContext& ctx, const DirectionSet& dirs,
                              const ForwardConfig& config,
                              const std::vector<LinearContrast>& family) {
  return ensure_bank<LinearContrast>(
      dir, "linear", "p_", ctx, dirs, config, family, linear_parameters,
      [](const LinearContrast& p) { return p.contrast(); });
}

Orientation calibrate_from_constants(const FarFieldMatrix& f_high, double c_high,
                                     const FarFieldMatrix& f_low, double c_low, double r_min,
                                     double r_max) {
  if (!(c_low < c_high)) throw PreconditionError("calibration needs two distinct constants");
  return calibrate_orientation(f_high, c_high, f_low, c_low, r_min, r_max);
}

// --- exporters ----------------------------------------------------------------------

namespace {

std::string header(Orientation o, double r_min, double r_max) {
  return "# orientation=" + to_string(o) + "\n# r_min=" + format_double(r_min) +
         "\n# r_max=" + format_double(r_max) + "\n";
}

}  // namespace

void write_bounds_csv(const fs::path& path, const BoundsResult& r) {
  std::ostringstream os;
  os << header(r.orientation, r.r_min, r.r_max);
  os << "# c_star=" << format_double(r.c_star) << "\n# c_upper=" << format_double(r.c_upper) << "\n";
  for (const auto& w : r.warnings) os << "# warning=" << w << "\n";
  os << "c,m_plus,m_minus,verdict\n";
  for (const auto& e : r.trail) {
    os << format_double(e.c) << ',' << e.counts.m_plus << ',' << e.counts.m_minus << ','
       << to_string(e.verdict) << '\n';
  }
  write_file(path, os.str());
}

void write_trace_csv(const fs::path& path, const TraceBounds& t) {
  std::ostringstream os;
  os << header(t.orientation, t.r_min, t.r_max);
  os << "# accepted_below=" << t.accepted_below << "\n# accepted_above=" << t.accepted_above
     << "\n# skipped=" << t.skipped.size() << "\n";
  os << "s_arclength,x,y,q_minus,q_plus\n";
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    os << format_double(t.s[i]) << ',' << format_double(t.points[i].x) << ','
       << format_double(t.points[i].y) << ',' << format_double(t.q_minus[i]) << ','
       << format_double(t.q_plus[i]) << '\n';
  }
  write_file(path, os.str());
}

void write_indicator_csv(const fs::path& path, const IndicatorMap& m) {
  std::ostringstream os;
  os << "# alpha=" << format_double(m.alpha) << "\n# resolution=" << m.grid.resolution() << "\n";
  os << "x,y,value\n";
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    const Point2 p = m.grid.points()[i];
    os << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(m.values[i]) << '\n';
  }
  write_file(path, os.str());
}

std::vector<unsigned char> indicator_bytes(const IndicatorMap& m) {
  const int r = m.grid.resolution();
  std::vector<unsigned char> out(static_cast<std::size_t>(r) * r);
  for (int row = 0; row < r; ++row) {
    const int iy = r - 1 - row;
    for (int ix = 0; ix < r; ++ix) {
      const double v = m.values[static_cast<std::size_t>(iy) * r + ix];
      out[static_cast<std::size_t>(row) * r + ix] =
          static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
  }
  return out;
}

void write_indicator_pgm(const fs::path& path, const IndicatorMap& m) {
  const auto bytes = indicator_bytes(m);
  std::ostringstream os;
  os << "P5\n# alpha=" << format_double(m.alpha) << "\n"
     << m.grid.resolution() << ' ' << m.grid.resolution() << "\n255\n";
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  write_file(path, os.str());
}

void write_orientation(const fs::path& path, const OrientationRecord& rec) {
  const json j = {{"orientation", to_string(rec.orientation)},
                  {"r_min", rec.r_min},
                  {"r_max", rec.r_max},
                  {"source", rec.source}};
  write_file(path, j.dump(1) + "\n");
}

OrientationRecord read_orientation(const fs::path& path) {
  try {
    const json j = json::parse(read_file(path));
    return {orientation_from_string(j.at("orientation").get<std::string>()),
            j.at("r_min").get<double>(), j.at("r_max").get<double>(),
            j.value("source", json(nullptr))};
  } catch (const json::exception& e) {
    throw PreconditionError("malformed orientation file " + path.string() + ": " + e.what());
  }
}

}  // namespace scatterbound::io
