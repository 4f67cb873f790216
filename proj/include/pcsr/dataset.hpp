#pragma once

// Paired coarse/fine dataset generation, train/val/test splits and the JSON
// manifest that indexes the series files.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pcsr/grid.hpp"
#include "pcsr/solver.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// Counter-based generator: the same key always yields the same value.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) noexcept;
/// Uniform in [0, 1) from a 64-bit hash.
double unit_from_hash(std::uint64_t h) noexcept;

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  double at(double unit) const noexcept { return lo + (hi - lo) * unit; }
};

enum class IcMode { Nested, Independent };
std::string_view to_string(IcMode m);
IcMode ic_mode_from_string(std::string_view s);

struct DatasetConfig {
  ProblemKind problem = ProblemKind::AllenCahn;
  BoundaryKind boundary = BoundaryKind::Periodic;
  std::size_t n_series = 40;
  std::size_t n_steps = 50;
  double t_final = 20.0;
  std::size_t coarse_n = 8;
  std::size_t fine_n = 64;
  std::uint64_t seed = 0;
  IcMode ic_mode = IcMode::Nested;
  double ic_amplitude = 0.1;
  ParamRange epsilon{3e-3, 6e-3};
  ParamRange K{0.5, 2.0};
  ParamRange r{0.5, 2.0};
  ParamRange theta{0.0, 1.5707963267948966};
  /// Allen-Cahn only: theta is derived from K theta / E^2 drawn from this range.
  ParamRange reaction_ratio{0.5, 0.6};
  InterfaceVariant interface = InterfaceVariant::Appendix;
  DerivativeMode mode = DerivativeMode::StandardFD;
  std::filesystem::path output_dir = "dataset";
  unsigned threads = 0;  // 0: hardware concurrency

  /// Allen-Cahn: Periodic, 40 series x 50 steps, T = 20.
  /// Eriksson-Johnson: Dirichlet, 20 series x 100 steps, T = 0.5,
  /// epsilon in [1e-3, 1e-2].
  static DatasetConfig defaults_for(ProblemKind problem);
  /// Throws ConfigError on inconsistent settings.
  void validate() const;
  double tau() const noexcept { return t_final / static_cast<double>(n_steps); }
};

struct ManifestEntry {
  std::size_t id = 0;
  std::string split;  // train | val | test | failed
  double epsilon = 0.0;
  double K = 0.0;
  double r = 0.0;
  double theta = 0.0;
  std::uint64_t seed = 0;
  double tau = 0.0;
  std::size_t n_frames = 0;
  std::string coarse;  // relative to the manifest directory
  std::string fine;
};

struct DatasetManifest {
  int version = 1;
  ProblemKind problem = ProblemKind::AllenCahn;
  BoundaryKind boundary = BoundaryKind::Periodic;
  std::vector<ManifestEntry> entries;
  std::filesystem::path root;  // directory holding the manifest; not serialized

  std::vector<const ManifestEntry*> split(std::string_view name) const;
  const ManifestEntry& entry(std::size_t id) const;
  std::filesystem::path coarse_path(const ManifestEntry& e) const { return root / e.coarse; }
  std::filesystem::path fine_path(const ManifestEntry& e) const { return root / e.fine; }
};

std::string manifest_to_json(const DatasetManifest& m);
/// Throws ConfigError on malformed or incomplete manifests.
DatasetManifest manifest_from_json(std::string_view text, const std::filesystem::path& root);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& m);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Train/val/test counts: train = round(0.7 n), val = round((n - train) / 2).
std::array<std::size_t, 3> split_counts(std::size_t n);
/// Seeded shuffle of `ids` into train/val/test (returned in that order).
std::array<std::vector<std::size_t>, 3> assign_splits(std::vector<std::size_t> ids,
                                                      std::uint64_t seed);

/// Per-series seed derived from the master seed.
std::uint64_t series_seed(std::uint64_t master, std::size_t id) noexcept;
ProblemSpec sample_problem(const DatasetConfig& cfg, std::size_t id);
/// Uniform noise in [-amplitude, amplitude] with its sample mean removed.
Field2D noise_field(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream, double amplitude);

struct SeriesPair {
  TimeSeries coarse;
  TimeSeries fine;
  std::uint64_t seed = 0;
};

/// Runs one series on both grids in memory (double precision). Throws
/// SolverError on divergence.
SeriesPair generate_series_pair(const DatasetConfig& cfg, std::size_t id);

/// Writes every series pair plus manifest.json and generation.json to
/// cfg.output_dir. Failed series get split "failed" and are left out of the
/// shuffle.
DatasetManifest generate_dataset(const DatasetConfig& cfg);

}  // namespace pcsr
