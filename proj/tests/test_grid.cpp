#include <doctest.h>

#include "helpers.hpp"
#include "pcsr/errors.hpp"
#include "pcsr/grid.hpp"

using namespace pcsr;
using namespace pcsr::test;

TEST_SUITE("grid") {
  TEST_CASE("field_constant fills every entry") {
    for (double c : {0.0, 1.0, -0.5}) {
      const std::size_t n = c == -0.5 ? 8 : 4;
      const Field2D f = field_constant(unit_grid(n), c);
      CHECK(f.size() == n * n);
      for (double v : f.values()) CHECK(v == c);
    }
  }

  TEST_CASE("grid validation") {
    CHECK_THROWS_AS(GridSpec({2, 4, 1, 1, 0, 0}).validate(), ShapeError);
    CHECK_THROWS_AS(GridSpec({4, 4, 0, 1, 0, 0}).validate(), ShapeError);
    CHECK_NOTHROW(unit_grid(3).validate());
    CHECK_THROWS_AS(Field2D(unit_grid(4), std::vector<double>(15, 0.0)), ShapeError);
    std::vector<double> bad(16, 0.0);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(Field2D(unit_grid(4), bad), DomainError);
  }

  TEST_CASE("pixel to physical map") {
    const GridSpec g{4, 3, 0.5, 0.25, 1.0, 2.0};
    CHECK(g.x(0) == 1.0);
    CHECK(g.x(3) == 2.5);
    CHECK(g.y(2) == 2.0);  // bottom row
    CHECK(g.y(0) == 2.5);  // top row
  }

  TEST_CASE("field_linf_diff") {
    const GridSpec g = unit_grid(4);
    const Field2D f = random_field(g, 1);
    CHECK(field_linf_diff(f, f) == 0.0);
    CHECK(field_linf_diff(field_constant(g, 0), field_constant(g, 1)) == 1.0);
    const Field2D h = random_field(g, 2);
    double oracle = 0.0;
    for (std::size_t k = 0; k < 16; ++k) oracle = std::max(oracle, std::abs(f[k] - h[k]));
    CHECK(field_linf_diff(f, h) == oracle);
    CHECK_THROWS_AS(field_linf_diff(f, field_constant(unit_grid(5), 0)), ShapeError);
  }

  TEST_CASE("field_linf_diff is a metric on random triples") {
    const GridSpec g = unit_grid(6);
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Field2D a = random_field(g, 3 * s), b = random_field(g, 3 * s + 1), c = random_field(g, 3 * s + 2);
      CHECK(field_linf_diff(a, b) == field_linf_diff(b, a));
      CHECK(field_linf_diff(a, c) <= field_linf_diff(a, b) + field_linf_diff(b, c) + 1e-15);
    }
  }

  TEST_CASE("extract_boundary on column-index field") {
    const GridSpec g = unit_grid(4);
    Field2D f(g);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) f(i, j) = static_cast<double>(j);
    CHECK(extract_boundary(f, Side::Left, 0) == std::vector<double>{0, 0, 0, 0});
    CHECK(extract_boundary(f, Side::Right, 0) == std::vector<double>{3, 3, 3, 3});
    CHECK(extract_boundary(f, Side::Left, 1) == std::vector<double>{1, 1, 1, 1});
    CHECK(extract_boundary(f, Side::Top, 0) == std::vector<double>{0, 1, 2, 3});
    CHECK_THROWS_AS(extract_boundary(f, Side::Left, 2), IndexError);
  }

  TEST_CASE("extract_boundary lengths and ordering") {
    const GridSpec g{7, 5, 0.1, 0.1, 0, 0};
    Field2D f(g);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k);
    for (Side s : {Side::Left, Side::Right, Side::Top, Side::Bottom}) {
      const auto v = extract_boundary(f, s, 0);
      const bool vertical = s == Side::Left || s == Side::Right;
      CHECK(v.size() == (vertical ? g.ny : g.nx));
      for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] == f[boundary_index(g, s, 0, k)]);
    }
    CHECK(extract_boundary(f, Side::Bottom, 1).front() == f(3, 0));
    CHECK(extract_boundary(f, Side::Right, 1).back() == f(4, 5));
  }

  TEST_CASE("field algebra") {
    const GridSpec g = unit_grid(5);
    const Field2D a = random_field(g, 4), b = random_field(g, 5);
    const Field2D c = linear_combination(2.0, a, -3.0, b);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(c[k] == doctest::Approx(2 * a[k] - 3 * b[k]));
    CHECK(field_linf_diff((a + b) - b, a) < 1e-15);
    CHECK(field_linf_diff(a * 2.0, 2.0 * a) == 0.0);
    CHECK(interior_count(g) == 9);
    CHECK(is_interior(g, 1, 1));
    CHECK_FALSE(is_interior(g, 0, 2));
  }

  TEST_CASE("problem validation and canonical grids") {
    ProblemSpec p = ac_problem();
    CHECK_NOTHROW(p.validate());
    p.boundary = BoundaryKind::Dirichlet;
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    ProblemSpec e = ej_problem();
    CHECK_NOTHROW(e.validate());
    e.boundary = BoundaryKind::Periodic;
    CHECK_THROWS_AS(e.validate(), ArgumentError);
    e = ej_problem();
    e.epsilon = 0;
    CHECK_THROWS_AS(e.validate(), ArgumentError);

    const GridSpec ga = canonical_grid(ac_problem(), 64, 64);
    CHECK(ga.hx == doctest::Approx(1.0 / 64));
    CHECK(ga.x0 == doctest::Approx(0.5 / 64));
    const GridSpec ge = canonical_grid(ej_problem(), 65, 65);
    CHECK(ge.x(0) == doctest::Approx(-1.0));
    CHECK(ge.x(64) == doctest::Approx(0.0));
    CHECK(ge.y(0) == doctest::Approx(0.5));

    CHECK(boundary_from_string(to_string(BoundaryKind::Neumann)) == BoundaryKind::Neumann);
    CHECK(problem_from_string(to_string(ProblemKind::ErikssonJohnson)) == ProblemKind::ErikssonJohnson);
    CHECK_THROWS_AS(boundary_from_string("robin"), ArgumentError);
  }
}
