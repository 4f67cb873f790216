#include "pcsr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "pcsr/errors.hpp"
#include "pcsr/parallel.hpp"
#include "pcsr/physics.hpp"
#include "pcsr/series_io.hpp"
#include "pcsr/sr_optim.hpp"

namespace pcsr {
namespace {

using nlohmann::json;

// RNG streams; each (seed, stream, index) triple is an independent draw.
constexpr std::uint64_t kStreamEpsilon = 1;
constexpr std::uint64_t kStreamK = 2;
constexpr std::uint64_t kStreamR = 3;
constexpr std::uint64_t kStreamTheta = 4;
constexpr std::uint64_t kStreamFineIc = 16;
constexpr std::uint64_t kStreamCoarseIc = 17;
constexpr std::uint64_t kStreamSplit = 99;

void check_range(const ParamRange& r, const char* name, bool positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi || (positive && r.lo <= 0.0)) {
    throw ConfigError(std::string("invalid range for ") + name);
  }
}

std::string series_file(std::size_t id, const char* kind) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "series_%04zu_%s.pcrs", id, kind);
  return buf;
}

json range_json(const ParamRange& r) { return json::array({r.lo, r.hi}); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) noexcept {
  return splitmix64(splitmix64(splitmix64(splitmix64(a) ^ b) ^ c) ^ d);
}

double unit_from_hash(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string_view to_string(IcMode m) { return m == IcMode::Nested ? "nested" : "independent"; }

IcMode ic_mode_from_string(std::string_view s) {
  if (s == "nested") return IcMode::Nested;
  if (s == "independent") return IcMode::Independent;
  throw ConfigError("unknown ic_mode '" + std::string(s) + "'");
}

DatasetConfig DatasetConfig::defaults_for(ProblemKind problem) {
  DatasetConfig c;
  c.problem = problem;
  if (problem == ProblemKind::ErikssonJohnson) {
    c.boundary = BoundaryKind::Dirichlet;
    c.n_series = 20;
    c.n_steps = 100;
    c.t_final = 0.5;
    c.epsilon = {1e-3, 1e-2};
  }
  return c;
}

void DatasetConfig::validate() const {
  ProblemSpec p;
  p.problem = problem;
  p.boundary = boundary;
  try {
    p.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (n_series == 0) throw ConfigError("n_series must be positive");
  if (n_steps < 2) throw ConfigError("n_steps must be at least 2");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be positive");
  if (coarse_n < 3 || fine_n < 3) throw ConfigError("grids must be at least 3x3");
  if (ic_mode == IcMode::Nested && fine_n % coarse_n != 0) {
    throw ConfigError("nested initial conditions need fine_n divisible by coarse_n");
  }
  if (!(ic_amplitude >= 0.0) || ic_amplitude >= kAllenCahnBound) {
    throw ConfigError("ic_amplitude must lie in [0, 0.99)");
  }
  check_range(epsilon, "epsilon", true);
  check_range(K, "K", false);
  check_range(r, "r", false);
  check_range(theta, "theta", false);
  check_range(reaction_ratio, "reaction_ratio", false);
  if (problem == ProblemKind::AllenCahn && reaction_ratio.lo <= 0.0) {
    throw ConfigError("reaction_ratio must be positive");
  }
  if (problem == ProblemKind::AllenCahn && K.lo <= 0.0) throw ConfigError("K must be positive");
  if (problem == ProblemKind::ErikssonJohnson && 4.0 * epsilon.hi * K.hi > 1.0) {
    throw ConfigError("epsilon * K must stay below 1/4 for the analytic data");
  }
}

std::vector<const ManifestEntry*> DatasetManifest::split(std::string_view name) const {
  std::vector<const ManifestEntry*> out;
  for (const ManifestEntry& e : entries) {
    if (e.split == name) out.push_back(&e);
  }
  return out;
}

const ManifestEntry& DatasetManifest::entry(std::size_t id) const {
  for (const ManifestEntry& e : entries) {
    if (e.id == id) return e;
  }
  throw ArgumentError("no series with id " + std::to_string(id));
}

std::string manifest_to_json(const DatasetManifest& m) {
  json j;
  j["version"] = m.version;
  j["problem"] = std::string(to_string(m.problem));
  j["boundary"] = std::string(to_string(m.boundary));
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"id", e.id},
                       {"split", e.split},
                       {"params", {{"epsilon", e.epsilon}, {"K", e.K}, {"r", e.r}, {"theta", e.theta}}},
                       {"seed", e.seed},
                       {"tau", e.tau},
                       {"n_frames", e.n_frames},
                       {"coarse", e.coarse},
                       {"fine", e.fine}});
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text, const std::filesystem::path& root) {
  DatasetManifest m;
  m.root = root;
  try {
    const json j = json::parse(text);
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw ConfigError("unsupported manifest version " + std::to_string(m.version));
    m.problem = problem_from_string(j.at("problem").get<std::string>());
    m.boundary = boundary_from_string(j.at("boundary").get<std::string>());
    for (const json& je : j.at("entries")) {
      ManifestEntry e;
      e.id = je.at("id").get<std::size_t>();
      e.split = je.at("split").get<std::string>();
      const json& p = je.at("params");
      e.epsilon = p.at("epsilon").get<double>();
      e.K = p.at("K").get<double>();
      e.r = p.at("r").get<double>();
      e.theta = p.at("theta").get<double>();
      e.seed = je.at("seed").get<std::uint64_t>();
      e.tau = je.at("tau").get<double>();
      e.n_frames = je.at("n_frames").get<std::size_t>();
      e.coarse = je.at("coarse").get<std::string>();
      e.fine = je.at("fine").get<std::string>();
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << manifest_to_json(m);
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open manifest " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return manifest_from_json(text, path.parent_path());
}

std::array<std::size_t, 3> split_counts(std::size_t n) {
  const auto train = static_cast<std::size_t>(std::lround(0.7 * static_cast<double>(n)));
  const auto val = static_cast<std::size_t>(std::lround(static_cast<double>(n - train) / 2.0));
  return {train, val, n - train - val};
}

std::array<std::vector<std::size_t>, 3> assign_splits(std::vector<std::size_t> ids,
                                                      std::uint64_t seed) {
  std::sort(ids.begin(), ids.end());
  for (std::size_t k = ids.size(); k > 1; --k) {
    const auto pick = static_cast<std::size_t>(
        unit_from_hash(hash_key(seed, kStreamSplit, k, 0)) * static_cast<double>(k));
    std::swap(ids[k - 1], ids[std::min(pick, k - 1)]);
  }
  const auto counts = split_counts(ids.size());
  std::array<std::vector<std::size_t>, 3> out;
  auto it = ids.begin();
  for (int s = 0; s < 3; ++s) {
    out[s].assign(it, it + static_cast<std::ptrdiff_t>(counts[s]));
    std::sort(out[s].begin(), out[s].end());
    it += static_cast<std::ptrdiff_t>(counts[s]);
  }
  return out;
}

std::uint64_t series_seed(std::uint64_t master, std::size_t id) noexcept {
  return hash_key(master, id, 0, 0);
}

ProblemSpec sample_problem(const DatasetConfig& cfg, std::size_t id) {
  const std::uint64_t s = series_seed(cfg.seed, id);
  auto draw = [&](std::uint64_t stream) { return unit_from_hash(hash_key(s, stream, 0, 0)); };
  ProblemSpec p;
  p.problem = cfg.problem;
  p.boundary = cfg.boundary;
  p.domain = default_domain(cfg.problem);
  p.interface = cfg.interface;
  p.epsilon = cfg.epsilon.at(draw(kStreamEpsilon));
  p.K = cfg.K.at(draw(kStreamK));
  if (cfg.problem == ProblemKind::AllenCahn) {
    p.r = 0.0;
    p.theta = theta_from_reaction_ratio(cfg.reaction_ratio.at(draw(kStreamTheta)), p.K, cfg.interface);
  } else {
    p.r = cfg.r.at(draw(kStreamR));
    p.theta = cfg.theta.at(draw(kStreamTheta));
  }
  return p;
}

Field2D noise_field(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream, double amplitude) {
  Field2D f(grid);
  double mean = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) {
    f[p] = amplitude * (2.0 * unit_from_hash(hash_key(seed, stream, p, 0)) - 1.0);
    mean += f[p];
  }
  mean /= static_cast<double>(f.size());
  for (double& v : f.values()) v -= mean;
  return f;
}

SeriesPair generate_series_pair(const DatasetConfig& cfg, std::size_t id) {
  cfg.validate();
  SeriesPair out;
  out.seed = series_seed(cfg.seed, id);
  const ProblemSpec p = sample_problem(cfg, id);
  const GridSpec cg = canonical_grid(p, cfg.coarse_n, cfg.coarse_n);
  const GridSpec fg = canonical_grid(p, cfg.fine_n, cfg.fine_n);
  Field2D ic_c, ic_f;
  if (p.problem == ProblemKind::AllenCahn) {
    ic_f = noise_field(fg, out.seed, kStreamFineIc, cfg.ic_amplitude);
    ic_c = cfg.ic_mode == IcMode::Nested
               ? block_downsample(ic_f, cfg.fine_n / cfg.coarse_n).with_grid(cg)
               : noise_field(cg, out.seed, kStreamCoarseIc, cfg.ic_amplitude);
  } else {
    ic_f = ej_analytic_field(fg, p, 0.0);
    ic_c = ej_analytic_field(cg, p, 0.0);
  }
  out.coarse = solve_series(p, cg, cfg.tau(), cfg.n_steps, ic_c, 0.0, cfg.mode);
  out.fine = solve_series(p, fg, cfg.tau(), cfg.n_steps, ic_f, 0.0, cfg.mode);
  return out;
}

DatasetManifest generate_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  struct Outcome {
    bool ok = false;
    std::string error;
    ProblemSpec problem;
  };
  std::vector<Outcome> outcomes(cfg.n_series);
  parallel_for(cfg.n_series, cfg.threads, [&](std::size_t id) {
    Outcome& o = outcomes[id];
    o.problem = sample_problem(cfg, id);
    try {
      const SeriesPair pair = generate_series_pair(cfg, id);
      write_series(cfg.output_dir / series_file(id, "coarse"), pair.coarse);
      write_series(cfg.output_dir / series_file(id, "fine"), pair.fine);
      o.ok = true;
    } catch (const SolverError& e) {
      o.error = e.what();
    }
  });

  std::vector<std::size_t> ok_ids;
  for (std::size_t id = 0; id < cfg.n_series; ++id) {
    if (outcomes[id].ok) ok_ids.push_back(id);
  }
  const auto splits = assign_splits(ok_ids, cfg.seed);
  std::vector<std::string> split_of(cfg.n_series, "failed");
  const char* names[] = {"train", "val", "test"};
  for (int s = 0; s < 3; ++s) {
    for (std::size_t id : splits[s]) split_of[id] = names[s];
  }

  DatasetManifest m;
  m.problem = cfg.problem;
  m.boundary = cfg.boundary;
  m.root = cfg.output_dir;
  json failed = json::array();
  for (std::size_t id = 0; id < cfg.n_series; ++id) {
    const Outcome& o = outcomes[id];
    ManifestEntry e;
    e.id = id;
    e.split = split_of[id];
    e.epsilon = o.problem.epsilon;
    e.K = o.problem.K;
    e.r = o.problem.r;
    e.theta = o.problem.theta;
    e.seed = series_seed(cfg.seed, id);
    e.tau = cfg.tau();
    if (o.ok) {
      e.n_frames = cfg.n_steps + 1;
      e.coarse = series_file(id, "coarse");
      e.fine = series_file(id, "fine");
    } else {
      failed.push_back({{"id", id}, {"error", o.error}});
    }
    m.entries.push_back(std::move(e));
  }
  write_manifest(cfg.output_dir / "manifest.json", m);

  json gen;
  gen["problem"] = std::string(to_string(cfg.problem));
  gen["boundary"] = std::string(to_string(cfg.boundary));
  gen["n_series"] = cfg.n_series;
  gen["n_steps"] = cfg.n_steps;
  gen["t_final"] = cfg.t_final;
  gen["tau"] = cfg.tau();
  gen["coarse_n"] = cfg.coarse_n;
  gen["fine_n"] = cfg.fine_n;
  gen["seed"] = cfg.seed;
  gen["ic_mode"] = std::string(to_string(cfg.ic_mode));
  gen["ic_amplitude"] = cfg.ic_amplitude;
  gen["interface"] = cfg.interface == InterfaceVariant::Appendix ? "appendix" : "main_text";
  gen["derivative_mode"] = cfg.mode == DerivativeMode::StandardFD ? "standard_fd" : "paper_kernel";
  gen["ranges"] = {{"epsilon", range_json(cfg.epsilon)}, {"K", range_json(cfg.K)},
                   {"r", range_json(cfg.r)}, {"theta", range_json(cfg.theta)},
                   {"reaction_ratio", range_json(cfg.reaction_ratio)}};
  gen["failed"] = std::move(failed);
  std::ofstream(cfg.output_dir / "generation.json", std::ios::binary | std::ios::trunc)
      << gen.dump(2) << "\n";
  return m;
}

}  // namespace pcsr
