#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "pcsr/dataset.hpp"
#include "pcsr/errors.hpp"
#include "pcsr/series_io.hpp"
#include "pcsr/sr_optim.hpp"

using namespace pcsr;
using namespace pcsr::test;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

DatasetConfig small_config(const fs::path& dir) {
  DatasetConfig c = DatasetConfig::defaults_for(ProblemKind::AllenCahn);
  c.n_series = 10;
  c.n_steps = 4;
  c.t_final = 1.6;
  c.coarse_n = 4;
  c.fine_n = 16;
  c.seed = 11;
  c.output_dir = dir;
  c.threads = 2;
  return c;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("hash generator is a pure function of its key") {
    CHECK(hash_key(1, 2, 3, 4) == hash_key(1, 2, 3, 4));
    CHECK(hash_key(1, 2, 3, 4) != hash_key(1, 2, 3, 5));
    CHECK(splitmix64(0) != splitmix64(1));
    double mean = 0;
    for (std::uint64_t k = 0; k < 20000; ++k) {
      const double u = unit_from_hash(hash_key(7, k, 0, 0));
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      mean += u;
    }
    CHECK(mean / 20000 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(series_seed(3, 0) != series_seed(3, 1));
    CHECK(series_seed(3, 0) != series_seed(4, 0));
  }

  TEST_CASE("split counts") {
    CHECK(split_counts(10) == std::array<std::size_t, 3>{7, 2, 1});
    CHECK(split_counts(40) == std::array<std::size_t, 3>{28, 6, 6});
    CHECK(split_counts(20) == std::array<std::size_t, 3>{14, 3, 3});
    CHECK(split_counts(0) == std::array<std::size_t, 3>{0, 0, 0});
    CHECK(split_counts(1) == std::array<std::size_t, 3>{1, 0, 0});
    for (std::size_t n = 0; n <= 200; ++n) {
      const auto c = split_counts(n);
      REQUIRE(c[0] + c[1] + c[2] == n);
      CHECK(std::abs(static_cast<double>(c[0]) - 0.7 * n) <= 0.5);
      CHECK(std::abs(static_cast<double>(c[1]) - 0.15 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(c[2]) - 0.15 * n) <= 1.0);
    }
  }

  TEST_CASE("splits are disjoint, exhaustive and seeded") {
    for (std::size_t n : {3u, 10u, 17u, 40u}) {
      std::vector<std::size_t> ids;
      for (std::size_t k = 0; k < n; ++k) ids.push_back(3 * k + 1);
      const auto s = assign_splits(ids, 5);
      std::multiset<std::size_t> all;
      for (const auto& part : s) all.insert(part.begin(), part.end());
      CHECK(all == std::multiset<std::size_t>(ids.begin(), ids.end()));
      const auto c = split_counts(n);
      for (int k = 0; k < 3; ++k) CHECK(s[k].size() == c[k]);
      CHECK(assign_splits(ids, 5) == s);
      std::vector<std::size_t> reversed(ids.rbegin(), ids.rend());
      CHECK(assign_splits(reversed, 5) == s);
    }
    std::vector<std::size_t> ids(40);
    for (std::size_t k = 0; k < 40; ++k) ids[k] = k;
    CHECK(assign_splits(ids, 1)[0] != assign_splits(ids, 2)[0]);
  }

  TEST_CASE("sampled parameters stay in their ranges") {
    const DatasetConfig ac = DatasetConfig::defaults_for(ProblemKind::AllenCahn);
    CHECK(ac.boundary == BoundaryKind::Periodic);
    CHECK(ac.n_series == 40);
    CHECK(ac.tau() == doctest::Approx(0.4));
    for (std::size_t id = 0; id < 50; ++id) {
      const ProblemSpec p = sample_problem(ac, id);
      CHECK(p.epsilon >= 3e-3);
      CHECK(p.epsilon <= 6e-3);
      const double E = interface_constant();
      const double ratio = p.K * p.theta / (E * E);
      CHECK(ratio >= 0.5 - 1e-12);
      CHECK(ratio <= 0.6 + 1e-12);
      CHECK_NOTHROW(p.validate());
    }
    const DatasetConfig ej = DatasetConfig::defaults_for(ProblemKind::ErikssonJohnson);
    CHECK(ej.boundary == BoundaryKind::Dirichlet);
    CHECK(ej.n_steps == 100);
    for (std::size_t id = 0; id < 50; ++id) {
      const ProblemSpec p = sample_problem(ej, id);
      CHECK(p.epsilon >= 1e-3);
      CHECK(p.epsilon <= 1e-2);
      CHECK(p.r >= 0.5);
      CHECK(p.r <= 2.0);
      CHECK(p.theta >= 0.0);
      CHECK(p.theta <= 1.5707963267948966);
    }
    CHECK(sample_problem(ac, 3).epsilon == sample_problem(ac, 3).epsilon);
  }

  TEST_CASE("noise is zero-mean and bounded") {
    const GridSpec g = unit_grid(32);
    const Field2D n = noise_field(g, 9, 16, 0.1);
    double mean = 0;
    for (double v : n.values()) {
      mean += v;
      CHECK(std::abs(v) <= 0.2);
    }
    CHECK(std::abs(mean) < 1e-13);
    CHECK(field_linf_diff(n, noise_field(g, 9, 16, 0.1)) == 0.0);
    CHECK(field_linf_diff(n, noise_field(g, 9, 17, 0.1)) > 0.0);
  }

  TEST_CASE("config validation") {
    DatasetConfig c = DatasetConfig::defaults_for(ProblemKind::AllenCahn);
    CHECK_NOTHROW(c.validate());
    auto bad = [&](auto mutate) {
      DatasetConfig d = c;
      mutate(d);
      CHECK_THROWS_AS(d.validate(), ConfigError);
    };
    bad([](DatasetConfig& d) { d.n_series = 0; });
    bad([](DatasetConfig& d) { d.n_steps = 1; });
    bad([](DatasetConfig& d) { d.t_final = -1; });
    bad([](DatasetConfig& d) { d.fine_n = 60; });
    bad([](DatasetConfig& d) { d.epsilon = {6e-3, 3e-3}; });
    bad([](DatasetConfig& d) { d.epsilon = {0, 3e-3}; });
    bad([](DatasetConfig& d) { d.reaction_ratio = {-1, 0.5}; });
    bad([](DatasetConfig& d) { d.boundary = BoundaryKind::Dirichlet; });
  }

  TEST_CASE("series pair shares its parameters and nests its initial data") {
    const DatasetConfig c = small_config(scratch_dir("pair"));
    const SeriesPair a = generate_series_pair(c, 2);
    CHECK(a.coarse.frames.size() == 5);
    CHECK(a.fine.frames.size() == 5);
    CHECK(a.coarse.grid().nx == 4);
    CHECK(a.fine.grid().nx == 16);
    CHECK(a.coarse.problem.epsilon == a.fine.problem.epsilon);
    CHECK(field_linf_diff(block_downsample(a.fine.frames[0], 4).with_grid(a.coarse.grid()), a.coarse.frames[0]) < 1e-15);
    const SeriesPair b = generate_series_pair(c, 2);
    for (std::size_t k = 0; k < 5; ++k) CHECK(field_linf_diff(a.fine.frames[k], b.fine.frames[k]) == 0.0);
  }

  TEST_CASE("generated dataset: manifest, splits and byte identity") {
    const fs::path d1 = scratch_dir("gen1"), d2 = scratch_dir("gen2");
    DatasetConfig c = small_config(d1);
    const DatasetManifest m = generate_dataset(c);
    c.output_dir = d2;
    c.threads = 1;
    generate_dataset(c);
    REQUIRE(m.entries.size() == 10);
    CHECK(m.split("train").size() == 7);
    CHECK(m.split("val").size() + m.split("test").size() == 3);
    CHECK(m.split("failed").empty());
    std::set<std::size_t> seen;
    for (const ManifestEntry& e : m.entries) {
      CHECK(seen.insert(e.id).second);
      CHECK(fs::exists(m.coarse_path(e)));
      CHECK(e.n_frames == 5);
      CHECK(e.tau == doctest::Approx(0.4));
      const TimeSeries fine = read_series(m.fine_path(e));
      CHECK(fine.frames.size() == 5);
      CHECK(fine.problem.epsilon == doctest::Approx(e.epsilon).epsilon(1e-12));
    }
    for (const auto& item : fs::directory_iterator(d1)) {
      CAPTURE(item.path());
      CHECK(slurp(item.path()) == slurp(d2 / item.path().filename()));
    }
    c.seed = 12;
    c.output_dir = scratch_dir("gen3");
    CHECK(slurp(d1 / "manifest.json") != slurp(generate_dataset(c).root / "manifest.json"));
  }

  TEST_CASE("manifest json round trip and errors") {
    const fs::path d = scratch_dir("manifest");
    const DatasetManifest m = generate_dataset(small_config(d));
    const DatasetManifest r = read_manifest(d / "manifest.json");
    CHECK(manifest_to_json(r) == manifest_to_json(m));
    CHECK(r.root == d);
    CHECK(r.entry(4).fine == m.entry(4).fine);
    CHECK_THROWS_AS(r.entry(99), ArgumentError);
    CHECK_THROWS_AS(manifest_from_json("{", d), ConfigError);
    CHECK_THROWS_AS(manifest_from_json(R"({"version": 2, "problem": "allen_cahn", "boundary": "periodic", "entries": []})", d), ConfigError);
    CHECK_THROWS_AS(manifest_from_json(R"({"version": 1, "problem": "allen_cahn", "boundary": "periodic"})", d), ConfigError);
    CHECK_THROWS_AS(manifest_from_json(R"({"version": 1, "problem": "heat", "boundary": "periodic", "entries": []})", d), ConfigError);
    CHECK_THROWS_AS(read_manifest(d / "missing.json"), ArgumentError);
  }

  TEST_CASE("failed series are marked and left out of the splits") {
    DatasetConfig c = small_config(scratch_dir("failing"));
    c.n_series = 6;
    c.n_steps = 3;
    c.t_final = 1e4;
    c.ic_amplitude = 0.95;
    const DatasetManifest m = generate_dataset(c);
    const auto failed = m.split("failed");
    REQUIRE(!failed.empty());
    REQUIRE(failed.size() < 6);
    for (const ManifestEntry* e : failed) {
      CHECK(e->n_frames == 0);
      CHECK(e->fine.empty());
      char name[64];
      std::snprintf(name, sizeof name, "series_%04zu_fine.pcrs", e->id);
      CHECK(!fs::exists(c.output_dir / name));
    }
    const auto ok = 6 - failed.size();
    const auto counts = split_counts(ok);
    CHECK(m.split("train").size() == counts[0]);
    CHECK(m.split("val").size() == counts[1]);
    CHECK(m.split("test").size() == counts[2]);
    const std::string gen = slurp(c.output_dir / "generation.json");
    CHECK(gen.find("\"failed\"") != std::string::npos);
    CHECK(gen.find("\"error\"") != std::string::npos);
  }
}
