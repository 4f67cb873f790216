#pragma once

// 3x3 convolution with boundary-aware padding, the fixed 64x64 derivative
// kernels, textbook finite-difference kernels and least-squares calibration
// of a kernel's multiplying coefficient.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pcsr/grid.hpp"

namespace pcsr {

/// out(i,j) = scale * sum_{a,b} k[a][b] * f(i+a-1, j+b-1)  (cross-correlation,
/// no kernel flip). Row a=0 is the row above the centre pixel.
struct Kernel3x3 {
  std::array<std::array<double, 3>, 3> k{};
  double scale = 1.0;

  double entry_sum() const noexcept;
  bool finite() const noexcept;
};

enum class DerivativeMode {
  /// The published 64x64 kernels used verbatim; refuses other grid sizes.
  PaperKernel,
  /// 5-point Laplacian / 1, central differences scaled by 1/h^2 and 1/(2h).
  StandardFD,
};

/// Grid size the fixed image kernels were tuned for.
inline constexpr std::size_t kImageKernelGrid = 64;

Kernel3x3 identity_kernel();
/// alpha * [[0,1,0],[1,4,1],[0,1,0]], alpha = 9.894.
Kernel3x3 paper_laplacian_kernel();
/// beta * [[1,0,-1],[3.5887,0,-3.5887],[1,0,-1]], beta = -5.645.
Kernel3x3 paper_ddx_kernel();
/// beta * [[1,3.5887,1],[0,0,0],[-1,-3.5887,-1]], beta = -5.645.
Kernel3x3 paper_ddy_kernel();

/// [[0,1,0],[1,-4,1],[0,1,0]] / h^2.
Kernel3x3 standard_laplacian_kernel(double h);
/// Central difference in physical x (increasing column index).
Kernel3x3 standard_ddx_kernel(double hx);
/// Central difference in physical y (increasing upwards, i.e. decreasing row).
Kernel3x3 standard_ddy_kernel(double hy);

/// Padding rules: Periodic wraps, Neumann replicates the edge pixel (mirror
/// across the wall of the adjacent interior value), Dirichlet takes ghost
/// values from the edge of `dirichlet_pad` (zeroth-order extrapolation of the
/// prescribed trace). Throws ShapeError when f is smaller than 3x3 or pad has
/// a different shape, ArgumentError when Dirichlet has no pad.
Field2D apply_kernel(const Field2D& f, const Kernel3x3& kern, BoundaryKind bc,
                     const Field2D* dirichlet_pad = nullptr);

/// Transpose of apply_kernel with respect to f (ghost values taken from a
/// Dirichlet pad are constants and drop out).
Field2D apply_kernel_adjoint(const Field2D& w, const Kernel3x3& kern, BoundaryKind bc);

/// One nonzero of the linear map f -> apply_kernel(f) (pad contributions excluded).
struct StencilEntry {
  std::size_t row;
  std::size_t col;
  double value;
};
/// Appends coef * (matrix of apply_kernel) to `out`.
void append_kernel_entries(const GridSpec& grid, const Kernel3x3& kern, BoundaryKind bc,
                           double coef, std::vector<StencilEntry>& out);

/// 5-point Laplacian (N + S + E + W - 4C) / h^2. Throws ArgumentError when
/// hx != hy.
Field2D standard_laplacian(const Field2D& f, BoundaryKind bc,
                           const Field2D* dirichlet_pad = nullptr);

/// Kernel for the Laplacian / d/dx / d/dy under a derivative mode. PaperKernel
/// throws ShapeError unless the grid is 64x64; StandardFD throws
/// ArgumentError on anisotropic grids for the Laplacian.
Kernel3x3 laplacian_kernel(DerivativeMode mode, const GridSpec& grid);
Kernel3x3 ddx_kernel(DerivativeMode mode, const GridSpec& grid);
Kernel3x3 ddy_kernel(DerivativeMode mode, const GridSpec& grid);

Field2D laplacian(const Field2D& f, DerivativeMode mode, BoundaryKind bc,
                  const Field2D* dirichlet_pad = nullptr);
Field2D ddx(const Field2D& f, DerivativeMode mode, BoundaryKind bc,
            const Field2D* dirichlet_pad = nullptr);
Field2D ddy(const Field2D& f, DerivativeMode mode, BoundaryKind bc,
            const Field2D* dirichlet_pad = nullptr);

/// One calibration sample: a field and the exact operator applied to it.
struct CalibrationSample {
  Field2D field;
  Field2D target;
};

/// Samples f = cos(n pi x) sin(m pi y) with the exact Laplacian
/// -(n^2 + m^2) pi^2 f for every (n, m) pair.
std::vector<CalibrationSample> trig_laplacian_samples(const GridSpec& grid,
                                                      std::span<const double> ns,
                                                      std::span<const double> ms);

/// Least-squares scalar c minimising sum over samples and interior pixels of
/// (c * conv(kern0, f) - target)^2. Throws ArgumentError without samples or on
/// grids smaller than 8x8, DomainError when every convolution output is zero.
double calibrate_coefficient(const Kernel3x3& kern0, std::span<const CalibrationSample> samples);

}  // namespace pcsr
