#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scatterbound/far_field_matrix.hpp"
#include "scatterbound/forward.hpp"
#include "scatterbound/inversion_bounds.hpp"
#include "scatterbound/inversion_fm.hpp"

namespace scatterbound::io {

inline constexpr const char* kFfoFormat = "ffo-v1";
inline constexpr const char* kFarfieldConvention = "volume-kernel";
inline constexpr const char* kGammaConvention = "1/(8*pi*k)";
inline constexpr const char* kWeightConvention = "2*pi/N";

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(const std::string& s);

void ffo_write(const std::filesystem::path& path, const FarFieldMatrix& f);
FarFieldMatrix ffo_read(const std::filesystem::path& path);
std::string ffo_serialize(const FarFieldMatrix& f);
FarFieldMatrix ffo_parse(const std::string& text, const std::string& source = "<string>");

/// Lowercase hex SHA-256 of a file's bytes.
std::string file_checksum(const std::filesystem::path& path);

/// Forward settings a bank was synthesized with; part of the manifest.
struct BankSettings {
  double k = 0.0;
  int n_directions = 0;
  double box_radius = 2.0;
  int grid_points = 256;
  double tolerance = 1e-8;
  int supersample = 8;

  static BankSettings from(const WaveContext& ctx, const DirectionSet& dirs, const ForwardConfig& c);
  bool operator==(const BankSettings&) const = default;
};

struct BankEntry {
  nlohmann::json parameters;  // {"c": value} or {"anchor": [x, y], "slope": s, "offset": o, "half_width": a}
  nlohmann::json contrast;
  std::string file;
  std::string checksum;
};

struct BankManifest {
  std::string kind;  // "constant" or "linear"
  BankSettings settings;
  std::vector<BankEntry> entries;
};

inline constexpr const char* kManifestName = "manifest.json";

void write_manifest(const std::filesystem::path& dir, const BankManifest& m);
BankManifest read_manifest(const std::filesystem::path& dir);

/// Writes every matrix as an FFO file plus the manifest with checksums.
BankManifest write_constant_bank(const std::filesystem::path& dir, const ConstantBank& bank,
                                 const BankSettings& settings);
BankManifest write_linear_bank(const std::filesystem::path& dir, const LinearBank& bank,
                               const BankSettings& settings);

/// Loads a bank, verifying every checksum. Throws PreconditionError on mismatch.
ConstantBank load_constant_bank(const std::filesystem::path& dir, BankSettings* settings = nullptr);
LinearBank load_linear_bank(const std::filesystem::path& dir, BankSettings* settings = nullptr);

/// Loads the bank in `dir` if its manifest matches the requested settings and
/// members, otherwise synthesizes and writes it.
ConstantBank ensure_constant_bank(const std::filesystem::path& dir, const WaveContext& ctx,
                                  const DirectionSet& dirs, const ForwardConfig& config,
                                  const std::vector<double>& values);
LinearBank ensure_linear_bank(const std::filesystem::path& dir, const WaveContext& ctx,
                              const DirectionSet& dirs, const ForwardConfig& config,
                              const std::vector<LinearContrast>& family);

/// Orientation from two members of a bank whose contrasts are constants on the
/// same square: the higher one is the reference, the lower one the probe.
Orientation calibrate_from_constants(const FarFieldMatrix& f_high, double c_high,
                                     const FarFieldMatrix& f_low, double c_low, double r_min,
                                     double r_max);

// --- result exporters; every bounds-related file carries orientation and radii ---

void write_bounds_csv(const std::filesystem::path& path, const BoundsResult& r);
void write_trace_csv(const std::filesystem::path& path, const TraceBounds& t);
void write_indicator_csv(const std::filesystem::path& path, const IndicatorMap& m);

/// P5 8-bit, value v -> round(255 v), top image row = largest y.
void write_indicator_pgm(const std::filesystem::path& path, const IndicatorMap& m);
std::vector<unsigned char> indicator_bytes(const IndicatorMap& m);

struct OrientationRecord {
  Orientation orientation = Orientation::PlusVanishesBelow;
  double r_min = 1e-8;
  double r_max = 1e-2;
  nlohmann::json source;  // how the orientation was obtained
};

void write_orientation(const std::filesystem::path& path, const OrientationRecord& rec);
OrientationRecord read_orientation(const std::filesystem::path& path);

}  // namespace scatterbound::io
