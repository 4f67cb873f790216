#pragma once

// Grid, field and problem description types shared by every module.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcsr {

/// Regular 2-D grid. Pixel (i, j) is row i counted from the top and column j
/// counted from the left; it sits at the physical point
/// (x0 + j*hx, y0 + (ny - 1 - i)*hy).
struct GridSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double hx = 0.0;
  double hy = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;

  /// Throws ShapeError unless nx, ny >= 3 and hx, hy > 0.
  void validate() const;

  std::size_t size() const noexcept { return nx * ny; }
  bool same_shape(const GridSpec& other) const noexcept {
    return nx == other.nx && ny == other.ny;
  }
  bool isotropic() const noexcept;

  double x(std::size_t j) const noexcept { return x0 + static_cast<double>(j) * hx; }
  double y(std::size_t i) const noexcept {
    return y0 + static_cast<double>(ny - 1 - i) * hy;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class BoundaryKind : unsigned char { Dirichlet = 0, Neumann = 1, Periodic = 2 };
enum class ProblemKind : unsigned char { AllenCahn = 0, ErikssonJohnson = 1 };

std::string_view to_string(BoundaryKind bc);
std::string_view to_string(ProblemKind p);
BoundaryKind boundary_from_string(std::string_view s);
ProblemKind problem_from_string(std::string_view s);

/// Axis-aligned physical extents of the computational domain.
struct Domain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// Which closed form of the Allen-Cahn interface constant to use: the
/// main-text tanh(0.9) or the appendix atanh(0.9) (default).
enum class InterfaceVariant : unsigned char { Appendix = 0, MainText = 1 };

struct ProblemSpec {
  ProblemKind problem = ProblemKind::AllenCahn;
  double epsilon = 1e-2;
  double K = 1.0;
  double r = 0.0;
  double theta = 0.0;
  BoundaryKind boundary = BoundaryKind::Periodic;
  Domain domain{};
  InterfaceVariant interface = InterfaceVariant::Appendix;

  /// Throws ArgumentError on epsilon <= 0 or a boundary kind the problem
  /// does not admit (Allen-Cahn: Neumann/Periodic, Eriksson-Johnson: Dirichlet).
  void validate() const;
};

/// Unit square for Allen-Cahn, (-1,0) x (-0.5,0.5) for Eriksson-Johnson.
Domain default_domain(ProblemKind p);

/// Allen-Cahn uses a cell-centred grid (h = L/n, pixel centres at h/2 from the
/// walls) so that block averaging maps fine cells onto coarse cells exactly.
/// Eriksson-Johnson uses a node-centred grid whose outer ring of pixels lies
/// on the Dirichlet boundary.
GridSpec canonical_grid(const ProblemSpec& problem, std::size_t nx, std::size_t ny);
GridSpec canonical_grid(ProblemKind problem, const Domain& domain, std::size_t nx,
                        std::size_t ny);

/// Single-channel scalar field, row-major.
class Field2D {
 public:
  Field2D() = default;
  /// Zero field.
  explicit Field2D(const GridSpec& grid);
  /// Throws ShapeError when data.size() != nx*ny, DomainError on non-finite data.
  Field2D(const GridSpec& grid, std::vector<double> data);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t nx() const noexcept { return grid_.nx; }
  std::size_t ny() const noexcept { return grid_.ny; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * grid_.nx + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * grid_.nx + j]; }
  double operator[](std::size_t k) const noexcept { return data_[k]; }
  double& operator[](std::size_t k) noexcept { return data_[k]; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  /// Same values on a different grid of identical shape.
  Field2D with_grid(const GridSpec& grid) const;

  bool all_finite() const noexcept;

  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double s) noexcept;

 private:
  GridSpec grid_{};
  std::vector<double> data_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(Field2D a, double s);
Field2D operator*(double s, Field2D a);

/// a*x + b*y.
Field2D linear_combination(double a, const Field2D& x, double b, const Field2D& y);

Field2D field_constant(const GridSpec& grid, double c);

/// Samples fn(x, y) at every pixel centre.
template <typename Fn>
Field2D field_from_function(const GridSpec& grid, Fn&& fn) {
  Field2D f(grid);
  for (std::size_t i = 0; i < grid.ny; ++i) {
    for (std::size_t j = 0; j < grid.nx; ++j) f(i, j) = fn(grid.x(j), grid.y(i));
  }
  return f;
}

/// max |a - b|. Throws ShapeError on mismatched grids.
double field_linf_diff(const Field2D& a, const Field2D& b);

void require_same_shape(const Field2D& a, const Field2D& b, std::string_view what);

enum class Side { Left, Right, Top, Bottom };

/// Row or column `offset` pixels inward from `side`. Left/right vectors run
/// top to bottom, top/bottom vectors run left to right.
std::vector<double> extract_boundary(const Field2D& f, Side side, std::size_t offset);

/// Flat index of element k of the vector returned by extract_boundary.
std::size_t boundary_index(const GridSpec& grid, Side side, std::size_t offset, std::size_t k);

/// 1 on pixels that are not on the outer one-pixel frame, 0 elsewhere.
bool is_interior(const GridSpec& grid, std::size_t i, std::size_t j) noexcept;
std::size_t interior_count(const GridSpec& grid) noexcept;

}  // namespace pcsr
