#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "pcsr/grid.hpp"

namespace pcsr::test {

inline GridSpec unit_grid(std::size_t nx, std::size_t ny = 0) {
  if (ny == 0) ny = nx;
  return GridSpec{nx, ny, 1.0 / static_cast<double>(nx), 1.0 / static_cast<double>(ny),
                  0.5 / static_cast<double>(nx), 0.5 / static_cast<double>(ny)};
}

inline Field2D random_field(const GridSpec& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field2D f(g);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

inline ProblemSpec ac_problem(BoundaryKind bc = BoundaryKind::Periodic) {
  ProblemSpec p;
  p.problem = ProblemKind::AllenCahn;
  p.epsilon = 4e-3;
  p.K = 1.0;
  p.theta = 0.3;
  p.boundary = bc;
  p.domain = default_domain(ProblemKind::AllenCahn);
  return p;
}

inline ProblemSpec ej_problem() {
  ProblemSpec p;
  p.problem = ProblemKind::ErikssonJohnson;
  p.epsilon = 5e-3;
  p.K = 1.0;
  p.r = 1.0;
  p.theta = 0.4;
  p.boundary = BoundaryKind::Dirichlet;
  p.domain = default_domain(ProblemKind::ErikssonJohnson);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pcsr_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pcsr::test
