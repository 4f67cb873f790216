#include "pcsr/grid.hpp"

#include <algorithm>
#include <cmath>

#include "pcsr/errors.hpp"

namespace pcsr {

void GridSpec::validate() const {
  if (nx < 3 || ny < 3) {
    throw ShapeError("grid must be at least 3x3, got " + std::to_string(nx) + "x" +
                     std::to_string(ny));
  }
  if (!(hx > 0.0) || !(hy > 0.0) || !std::isfinite(hx) || !std::isfinite(hy)) {
    throw ShapeError("grid spacing must be positive and finite");
  }
}

bool GridSpec::isotropic() const noexcept {
  return std::abs(hx - hy) <= 1e-12 * std::max(hx, hy);
}

std::string_view to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::Dirichlet: return "dirichlet";
    case BoundaryKind::Neumann: return "neumann";
    case BoundaryKind::Periodic: return "periodic";
  }
  return "unknown";
}

std::string_view to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::AllenCahn: return "allen_cahn";
    case ProblemKind::ErikssonJohnson: return "eriksson_johnson";
  }
  return "unknown";
}

BoundaryKind boundary_from_string(std::string_view s) {
  if (s == "dirichlet") return BoundaryKind::Dirichlet;
  if (s == "neumann") return BoundaryKind::Neumann;
  if (s == "periodic") return BoundaryKind::Periodic;
  throw ArgumentError("unknown boundary kind '" + std::string(s) + "'");
}

ProblemKind problem_from_string(std::string_view s) {
  if (s == "allen_cahn") return ProblemKind::AllenCahn;
  if (s == "eriksson_johnson") return ProblemKind::ErikssonJohnson;
  throw ArgumentError("unknown problem '" + std::string(s) + "'");
}

void ProblemSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ArgumentError("epsilon must be positive");
  }
  if (!std::isfinite(K) || !std::isfinite(r) || !std::isfinite(theta)) {
    throw ArgumentError("problem parameters must be finite");
  }
  if (problem == ProblemKind::AllenCahn && boundary == BoundaryKind::Dirichlet) {
    throw ArgumentError("Allen-Cahn admits only Neumann or Periodic boundaries");
  }
  if (problem == ProblemKind::ErikssonJohnson && boundary != BoundaryKind::Dirichlet) {
    throw ArgumentError("Eriksson-Johnson admits only Dirichlet boundaries");
  }
  if (!(domain.x_max > domain.x_min) || !(domain.y_max > domain.y_min)) {
    throw ArgumentError("empty domain");
  }
}

Domain default_domain(ProblemKind p) {
  if (p == ProblemKind::ErikssonJohnson) return Domain{-1.0, 0.0, -0.5, 0.5};
  return Domain{0.0, 1.0, 0.0, 1.0};
}

GridSpec canonical_grid(ProblemKind problem, const Domain& d, std::size_t nx, std::size_t ny) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  const double lx = d.x_max - d.x_min;
  const double ly = d.y_max - d.y_min;
  if (problem == ProblemKind::AllenCahn) {
    g.hx = lx / static_cast<double>(nx);
    g.hy = ly / static_cast<double>(ny);
    g.x0 = d.x_min + 0.5 * g.hx;
    g.y0 = d.y_min + 0.5 * g.hy;
  } else {
    g.hx = lx / static_cast<double>(nx - 1);
    g.hy = ly / static_cast<double>(ny - 1);
    g.x0 = d.x_min;
    g.y0 = d.y_min;
  }
  g.validate();
  return g;
}

GridSpec canonical_grid(const ProblemSpec& problem, std::size_t nx, std::size_t ny) {
  return canonical_grid(problem.problem, problem.domain, nx, ny);
}

Field2D::Field2D(const GridSpec& grid) : grid_(grid), data_(grid.size(), 0.0) {
  grid_.validate();
}

Field2D::Field2D(const GridSpec& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  grid_.validate();
  if (data_.size() != grid_.size()) {
    throw ShapeError("field data has " + std::to_string(data_.size()) + " values, grid needs " +
                     std::to_string(grid_.size()));
  }
  if (!all_finite()) throw DomainError("field contains non-finite values");
}

Field2D Field2D::with_grid(const GridSpec& grid) const {
  if (!grid.same_shape(grid_)) throw ShapeError("with_grid: shape mismatch");
  Field2D out = *this;
  out.grid_ = grid;
  return out;
}

bool Field2D::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Field2D& Field2D::operator+=(const Field2D& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Field2D& Field2D::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(Field2D a, double s) { return a *= s; }
Field2D operator*(double s, Field2D a) { return a *= s; }

Field2D linear_combination(double a, const Field2D& x, double b, const Field2D& y) {
  require_same_shape(x, y, "linear_combination");
  Field2D out(x.grid());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = a * x[k] + b * y[k];
  return out;
}

Field2D field_constant(const GridSpec& grid, double c) {
  grid.validate();
  return Field2D(grid, std::vector<double>(grid.size(), c));
}

void require_same_shape(const Field2D& a, const Field2D& b, std::string_view what) {
  if (!a.grid().same_shape(b.grid())) {
    throw ShapeError(std::string(what) + ": grid mismatch (" + std::to_string(a.nx()) + "x" +
                     std::to_string(a.ny()) + " vs " + std::to_string(b.nx()) + "x" +
                     std::to_string(b.ny()) + ")");
  }
}

double field_linf_diff(const Field2D& a, const Field2D& b) {
  require_same_shape(a, b, "field_linf_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

std::size_t boundary_index(const GridSpec& g, Side side, std::size_t offset, std::size_t k) {
  switch (side) {
    case Side::Left: return k * g.nx + offset;
    case Side::Right: return k * g.nx + (g.nx - 1 - offset);
    case Side::Top: return offset * g.nx + k;
    case Side::Bottom: return (g.ny - 1 - offset) * g.nx + k;
  }
  return 0;
}

std::vector<double> extract_boundary(const Field2D& f, Side side, std::size_t offset) {
  const GridSpec& g = f.grid();
  if (offset >= std::min(g.nx, g.ny) / 2) {
    throw IndexError("boundary offset " + std::to_string(offset) + " out of range");
  }
  const bool vertical = side == Side::Left || side == Side::Right;
  const std::size_t n = vertical ? g.ny : g.nx;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = f[boundary_index(g, side, offset, k)];
  return out;
}

bool is_interior(const GridSpec& g, std::size_t i, std::size_t j) noexcept {
  return i > 0 && j > 0 && i + 1 < g.ny && j + 1 < g.nx;
}

std::size_t interior_count(const GridSpec& g) noexcept { return (g.nx - 2) * (g.ny - 2); }

}  // namespace pcsr
