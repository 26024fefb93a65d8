#pragma once

#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "scatterbound/cli_io.hpp"

namespace testsupport {

using namespace scatterbound;

inline std::filesystem::path bank_dir() {
  if (const char* env = std::getenv("SCATTERBOUND_BANK_DIR")) return env;
  return SCATTERBOUND_DEFAULT_BANK_DIR;
}

// k = 2 pi, 32 directions, default grid: the bounds setup at desk scale.
inline WaveContext bench_ctx() { return WaveContext(2.0 * std::numbers::pi); }
inline DirectionSet bench_dirs() { return DirectionSet(32); }

inline std::vector<double> constant_bank_values() { return uniform_values(-0.4, 1.5, 0.1); }

inline const ConstantBank& constant_bank() {
  static const ConstantBank bank = io::ensure_constant_bank(
      bank_dir() / "const", bench_ctx(), bench_dirs(), ForwardConfig{}, constant_bank_values());
  return bank;
}

inline std::vector<LinearContrast> reduced_family() {
  return linear_test_family(12, {-2.0, -1.0, 0.0, 1.0, 2.0}, uniform_values(0.0, 1.0, 0.2));
}

inline const LinearBank& reduced_linear_bank() {
  static const LinearBank bank = io::ensure_linear_bank(
      bank_dir() / "linear_reduced", bench_ctx(), bench_dirs(), ForwardConfig{}, reduced_family());
  return bank;
}

inline const FarFieldMatrix& bank_member(double c) {
  for (const auto& [v, f] : constant_bank()) {
    if (std::fabs(v - c) < 1e-9) return f;
  }
  throw std::out_of_range("no bank member for c");
}

// Far field for the benchmark setup, cached as an FFO file next to the banks.
inline FarFieldMatrix bench_far_field(const std::string& name, const ContrastField& q,
                                      const ForwardConfig& config = {}) {
  const auto path = bank_dir() / "data" /
                    (name + "_m" + std::to_string(config.grid_points) + "_s" +
                     std::to_string(config.supersample) + ".ffo");
  if (std::filesystem::exists(path)) {
    try {
      FarFieldMatrix f = io::ffo_read(path);
      if (f.contrast && *f.contrast == q && f.ctx == bench_ctx() && f.size() == 32) return f;
    } catch (const std::exception&) {
    }
  }
  FarFieldMatrix f = far_field_matrix(bench_ctx(), q, bench_dirs(), config);
  io::ffo_write(path, f);
  return f;
}

// Sign-changing demo at k = 5 with 64 directions, cached like the benchmark data.
inline const FarFieldMatrix& demo_far_field() {
  static const FarFieldMatrix f = [] {
    const auto path = bank_dir() / "data" / "sign_demo_k5_n64.ffo";
    if (std::filesystem::exists(path)) {
      try {
        return io::ffo_read(path);
      } catch (const std::exception&) {
      }
    }
    FarFieldMatrix g = far_field_matrix(WaveContext(5.0), sign_changing_demo(), DirectionSet(64));
    io::ffo_write(path, g);
    return g;
  }();
  return f;
}

inline ContrastField bump_contrast() {
  return sum({{1.0, builtin_qc()}, {1.0, constant_on_square(0.3, 0.2, {0.3, 0.3})}});
}

inline Eigen::MatrixXcd random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = {g(rng), g(rng)};
  }
  return a;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double distance_to_box(Point2 p, const Box& b) {
  const double dx = std::max({b.xmin - p.x, 0.0, p.x - b.xmax});
  const double dy = std::max({b.ymin - p.y, 0.0, p.y - b.ymax});
  return std::hypot(dx, dy);
}

}  // namespace testsupport
