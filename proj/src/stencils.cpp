#include "pcsr/stencils.hpp"

#include <cmath>
#include <numbers>

#include "pcsr/errors.hpp"

namespace pcsr {
namespace {

constexpr double kImageLaplacianScale = 9.894;
constexpr double kImageGradientScale = -5.645;
constexpr double kImageSideWeight = 3.5887;

// Where a (possibly out-of-range) neighbour index comes from.
struct Source {
  std::size_t index;
  bool from_pad;
};

std::size_t clamp_index(long v, std::size_t n) {
  if (v < 0) return 0;
  if (v >= static_cast<long>(n)) return n - 1;
  return static_cast<std::size_t>(v);
}

std::size_t wrap_index(long v, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((v % m) + m) % m);
}

Source resolve(long i, long j, const GridSpec& g, BoundaryKind bc) {
  const bool inside = i >= 0 && j >= 0 && i < static_cast<long>(g.ny) && j < static_cast<long>(g.nx);
  if (inside) return {static_cast<std::size_t>(i) * g.nx + static_cast<std::size_t>(j), false};
  switch (bc) {
    case BoundaryKind::Periodic:
      return {wrap_index(i, g.ny) * g.nx + wrap_index(j, g.nx), false};
    case BoundaryKind::Neumann:
      return {clamp_index(i, g.ny) * g.nx + clamp_index(j, g.nx), false};
    case BoundaryKind::Dirichlet:
      return {clamp_index(i, g.ny) * g.nx + clamp_index(j, g.nx), true};
  }
  return {0, false};
}

void check_operand(const Field2D& f) {
  if (f.nx() < 3 || f.ny() < 3) throw ShapeError("kernel operand must be at least 3x3");
}

void require_image_grid(const GridSpec& g) {
  if (g.nx != kImageKernelGrid || g.ny != kImageKernelGrid) {
    throw ShapeError("image kernels are only valid on 64x64 grids, got " + std::to_string(g.nx) +
                     "x" + std::to_string(g.ny));
  }
}

}  // namespace

double Kernel3x3::entry_sum() const noexcept {
  double s = 0.0;
  for (const auto& row : k)
    for (double v : row) s += v;
  return s;
}

bool Kernel3x3::finite() const noexcept {
  for (const auto& row : k)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return std::isfinite(scale);
}

Kernel3x3 identity_kernel() { return {{{{0, 0, 0}, {0, 1, 0}, {0, 0, 0}}}, 1.0}; }

Kernel3x3 paper_laplacian_kernel() { return {{{{0, 1, 0}, {1, 4, 1}, {0, 1, 0}}}, kImageLaplacianScale}; }

Kernel3x3 paper_ddx_kernel() {
  return {{{{1, 0, -1}, {kImageSideWeight, 0, -kImageSideWeight}, {1, 0, -1}}}, kImageGradientScale};
}

Kernel3x3 paper_ddy_kernel() {
  return {{{{1, kImageSideWeight, 1}, {0, 0, 0}, {-1, -kImageSideWeight, -1}}}, kImageGradientScale};
}

Kernel3x3 standard_laplacian_kernel(double h) {
  return {{{{0, 1, 0}, {1, -4, 1}, {0, 1, 0}}}, 1.0 / (h * h)};
}

Kernel3x3 standard_ddx_kernel(double hx) {
  return {{{{0, 0, 0}, {-1, 0, 1}, {0, 0, 0}}}, 1.0 / (2.0 * hx)};
}

Kernel3x3 standard_ddy_kernel(double hy) {
  return {{{{0, 1, 0}, {0, 0, 0}, {0, -1, 0}}}, 1.0 / (2.0 * hy)};
}

Field2D apply_kernel(const Field2D& f, const Kernel3x3& kern, BoundaryKind bc,
                     const Field2D* dirichlet_pad) {
  check_operand(f);
  if (!kern.finite()) throw ArgumentError("kernel has non-finite entries");
  if (bc == BoundaryKind::Dirichlet) {
    if (dirichlet_pad == nullptr) throw ArgumentError("Dirichlet padding requires a pad field");
    require_same_shape(f, *dirichlet_pad, "apply_kernel pad");
  }
  const GridSpec& g = f.grid();
  Field2D out(g);
  const long ny = static_cast<long>(g.ny);
  const long nx = static_cast<long>(g.nx);
  for (long i = 0; i < ny; ++i) {
    const bool edge_row = i == 0 || i == ny - 1;
    for (long j = 0; j < nx; ++j) {
      double acc = 0.0;
      if (!edge_row && j > 0 && j < nx - 1) {
        const std::size_t c = static_cast<std::size_t>(i) * g.nx + static_cast<std::size_t>(j);
        for (int a = 0; a < 3; ++a) {
          const std::size_t base = c + (static_cast<std::size_t>(a) - 1) * g.nx;
          acc += kern.k[a][0] * f[base - 1] + kern.k[a][1] * f[base] + kern.k[a][2] * f[base + 1];
        }
      } else {
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            if (kern.k[a][b] == 0.0) continue;
            const Source s = resolve(i + a - 1, j + b - 1, g, bc);
            acc += kern.k[a][b] * (s.from_pad ? (*dirichlet_pad)[s.index] : f[s.index]);
          }
        }
      }
      out[static_cast<std::size_t>(i) * g.nx + static_cast<std::size_t>(j)] = kern.scale * acc;
    }
  }
  return out;
}

Field2D apply_kernel_adjoint(const Field2D& w, const Kernel3x3& kern, BoundaryKind bc) {
  check_operand(w);
  const GridSpec& g = w.grid();
  Field2D out(g);
  for (long i = 0; i < static_cast<long>(g.ny); ++i) {
    for (long j = 0; j < static_cast<long>(g.nx); ++j) {
      const double wp = kern.scale * w[static_cast<std::size_t>(i) * g.nx + static_cast<std::size_t>(j)];
      if (wp == 0.0) continue;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (kern.k[a][b] == 0.0) continue;
          const Source s = resolve(i + a - 1, j + b - 1, g, bc);
          if (!s.from_pad) out[s.index] += kern.k[a][b] * wp;
        }
      }
    }
  }
  return out;
}

void append_kernel_entries(const GridSpec& g, const Kernel3x3& kern, BoundaryKind bc, double coef,
                           std::vector<StencilEntry>& out) {
  for (long i = 0; i < static_cast<long>(g.ny); ++i) {
    for (long j = 0; j < static_cast<long>(g.nx); ++j) {
      const std::size_t row = static_cast<std::size_t>(i) * g.nx + static_cast<std::size_t>(j);
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          if (kern.k[a][b] == 0.0) continue;
          const Source s = resolve(i + a - 1, j + b - 1, g, bc);
          if (!s.from_pad) out.push_back({row, s.index, coef * kern.scale * kern.k[a][b]});
        }
      }
    }
  }
}

Field2D standard_laplacian(const Field2D& f, BoundaryKind bc, const Field2D* dirichlet_pad) {
  if (!f.grid().isotropic()) throw ArgumentError("standard_laplacian: unsupported anisotropy (hx != hy)");
  return apply_kernel(f, standard_laplacian_kernel(f.grid().hx), bc, dirichlet_pad);
}

Kernel3x3 laplacian_kernel(DerivativeMode mode, const GridSpec& grid) {
  if (mode == DerivativeMode::PaperKernel) {
    require_image_grid(grid);
    return paper_laplacian_kernel();
  }
  if (!grid.isotropic()) throw ArgumentError("Laplacian: unsupported anisotropy (hx != hy)");
  return standard_laplacian_kernel(grid.hx);
}

Kernel3x3 ddx_kernel(DerivativeMode mode, const GridSpec& grid) {
  if (mode == DerivativeMode::PaperKernel) {
    require_image_grid(grid);
    return paper_ddx_kernel();
  }
  return standard_ddx_kernel(grid.hx);
}

Kernel3x3 ddy_kernel(DerivativeMode mode, const GridSpec& grid) {
  if (mode == DerivativeMode::PaperKernel) {
    require_image_grid(grid);
    return paper_ddy_kernel();
  }
  return standard_ddy_kernel(grid.hy);
}

Field2D laplacian(const Field2D& f, DerivativeMode mode, BoundaryKind bc, const Field2D* pad) {
  return apply_kernel(f, laplacian_kernel(mode, f.grid()), bc, pad);
}

Field2D ddx(const Field2D& f, DerivativeMode mode, BoundaryKind bc, const Field2D* pad) {
  return apply_kernel(f, ddx_kernel(mode, f.grid()), bc, pad);
}

Field2D ddy(const Field2D& f, DerivativeMode mode, BoundaryKind bc, const Field2D* pad) {
  return apply_kernel(f, ddy_kernel(mode, f.grid()), bc, pad);
}

std::vector<CalibrationSample> trig_laplacian_samples(const GridSpec& grid,
                                                      std::span<const double> ns,
                                                      std::span<const double> ms) {
  using std::numbers::pi;
  std::vector<CalibrationSample> out;
  for (double n : ns) {
    for (double m : ms) {
      auto f = field_from_function(grid, [&](double x, double y) {
        return std::cos(n * pi * x) * std::sin(m * pi * y);
      });
      Field2D target = f * (-(n * n + m * m) * pi * pi);
      out.push_back({std::move(f), std::move(target)});
    }
  }
  return out;
}

double calibrate_coefficient(const Kernel3x3& kern0, std::span<const CalibrationSample> samples) {
  if (samples.empty()) throw ArgumentError("calibrate_coefficient: no samples");
  double num = 0.0;
  double den = 0.0;
  for (const CalibrationSample& s : samples) {
    require_same_shape(s.field, s.target, "calibrate_coefficient");
    const GridSpec& g = s.field.grid();
    if (g.nx < 8 || g.ny < 8) throw ArgumentError("calibrate_coefficient: grid must be at least 8x8");
    const Field2D conv = apply_kernel(s.field, kern0, BoundaryKind::Neumann);
    for (std::size_t i = 1; i + 1 < g.ny; ++i) {
      for (std::size_t j = 1; j + 1 < g.nx; ++j) {
        num += conv(i, j) * s.target(i, j);
        den += conv(i, j) * conv(i, j);
      }
    }
  }
  if (den == 0.0) throw DomainError("calibrate_coefficient: degenerate fit (all-zero convolution)");
  return num / den;
}

}  // namespace pcsr
