#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "pcsr/errors.hpp"
#include "pcsr/metrics.hpp"
#include "pcsr/physics.hpp"
#include "pcsr/solver.hpp"
#include "pcsr/sr_optim.hpp"

using namespace pcsr;
using namespace pcsr::test;

namespace {

double dot(const Field2D& a, const Field2D& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double cubic(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * (2 * p1 + (-p0 + p2) * t + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t * t + (-p0 + 3 * p1 - 3 * p2 + p3) * t * t * t);
}

Field2D bicubic_oracle(const Field2D& lr, std::size_t f) {
  const long nx = static_cast<long>(lr.nx()), ny = static_cast<long>(lr.ny());
  auto at = [&](long i, long j) {
    return lr(static_cast<std::size_t>(std::clamp(i, 0L, ny - 1)), static_cast<std::size_t>(std::clamp(j, 0L, nx - 1)));
  };
  Field2D out(refine_grid(lr.grid(), f));
  for (std::size_t I = 0; I < out.ny(); ++I)
    for (std::size_t J = 0; J < out.nx(); ++J) {
      const double sy = (I + 0.5) / f - 0.5, sx = (J + 0.5) / f - 0.5;
      const long i = static_cast<long>(std::floor(sy)), j = static_cast<long>(std::floor(sx));
      double rows[4];
      for (int a = 0; a < 4; ++a)
        rows[a] = cubic(at(i - 1 + a, j - 1), at(i - 1 + a, j), at(i - 1 + a, j + 1), at(i - 1 + a, j + 2), sx - j);
      out(I, J) = cubic(rows[0], rows[1], rows[2], rows[3], sy - i);
    }
  return out;
}

struct Instance {
  SrInputs in;
  Field2D u;
};

// 16x16 fine grid, factor 2: solver history, a noisy coarse target and an
// iterate within 2e-5 of the true frame. Stiff reactions make the objective
// grow fast away from the solution, which would drown the finite differences.
Instance random_instance(ProblemKind kind, std::uint64_t seed) {
  const bool ac = kind == ProblemKind::AllenCahn;
  const ProblemSpec p = ac ? ac_problem() : ej_problem();
  const GridSpec g = canonical_grid(p, 16, 16);
  const double tau = ac ? 0.4 : 0.05;
  const Field2D ic = ac ? random_field(g, seed, -0.5, 0.5) : ej_analytic_field(g, p, 0.0);
  const TimeSeries ts = solve_series(p, g, tau, 3, ic);
  Instance inst;
  const Field2D lr = block_downsample(ts.frames[3], 2);
  inst.in = SrInputs{lr + random_field(lr.grid(), seed + 2, -0.1, 0.1), {ts.frames[2], ts.frames[1]}, tau, ts.time(3), p};
  inst.u = ts.frames[3] + random_field(g, seed + 1, -2e-5, 2e-5);
  if (ac) inst.u = clamp_allen_cahn(inst.u);
  return inst;
}

double fd_component(const Field2D& u, std::size_t p, const SrInputs& in, const SrOptions& o) {
  return central_difference([&](double d) {
    Field2D v = u;
    v[p] += d;
    return sr_objective(v, in, o);
  });
}

double ac_equilibrium(const SpatialOperator& op) {
  double lo = 0.5, hi = kAllenCahnBound;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (op.reaction(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("sr_optim") {
  TEST_CASE("block downsample") {
    const GridSpec g = unit_grid(64);
    const Field2D cc = block_downsample(field_constant(g, 0.3), 8);
    for (double v : cc.values()) CHECK(v == doctest::Approx(0.3));
    Field2D checker(g);
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t j = 0; j < 64; ++j) checker(i, j) = (i + j) % 2 ? 1.0 : -1.0;
    const Field2D cd = block_downsample(checker, 8);
    CHECK(cd.nx() == 8);
    for (double v : cd.values()) CHECK(v == 0.0);
    // Grids below 3x3 are invalid, so the 4x4 ramp sits in the top-left corner of an 8x8 field.
    Field2D r(unit_grid(8));
    for (std::size_t k = 0; k < 16; ++k) r(k / 4, k % 4) = static_cast<double>(k);
    const Field2D d = block_downsample(r, 2);
    CHECK(d(0, 0) == 2.5);
    CHECK(d(0, 1) == 4.5);
    CHECK(d(1, 0) == 10.5);
    CHECK(d(1, 1) == 12.5);
    CHECK_THROWS_AS(block_downsample(random_field(unit_grid(10), 1), 4), ShapeError);
    // Coarse cell centres sit at the block centres.
    CHECK(cd.grid().x0 == doctest::Approx(0.5 / 8));
    CHECK(cd.grid().hx == doctest::Approx(1.0 / 8));
  }

  TEST_CASE("downsample adjoint identity") {
    const GridSpec g = unit_grid(24);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Field2D u = random_field(g, s), v = random_field(unit_grid(6), s + 10);
      const Field2D Au = block_downsample(u, 4);
      const Field2D Atv = block_downsample_adjoint(v.with_grid(Au.grid()), 4);
      CHECK(dot(Au, v) == doctest::Approx(dot(u, Atv)).epsilon(1e-12));
      CHECK(Atv.grid().nx == 24);
    }
  }

  TEST_CASE("bicubic upsample") {
    const GridSpec g = unit_grid(8);
    const Field2D c = bicubic_upsample(field_constant(g, -0.4), 8);
    CHECK(c.nx() == 64);
    for (double v : c.values()) CHECK(v == doctest::Approx(-0.4).epsilon(1e-14));
    const Field2D lr = random_field(g, 3);
    CHECK(field_linf_diff(bicubic_upsample(lr, 8), bicubic_oracle(lr, 8)) < 1e-12);
    CHECK(field_linf_diff(bicubic_upsample(lr, 3), bicubic_oracle(lr, 3)) < 1e-12);
    const auto ramp = [](double x, double y) { return 0.3 + 2.0 * x - 1.5 * y; };
    const Field2D lin = field_from_function(g, ramp);
    const Field2D up = bicubic_upsample(lin, 8);
    const GridSpec& fg = up.grid();
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t j = 0; j < 64; ++j) {
        const double sy = (i + 0.5) / 8 - 0.5, sx = (j + 0.5) / 8 - 0.5;
        if (std::floor(sy) < 1 || std::floor(sy) > 5 || std::floor(sx) < 1 || std::floor(sx) > 5) continue;
        CHECK(up(i, j) == doctest::Approx(ramp(fg.x(j), fg.y(i))).epsilon(1e-12));
      }
    CHECK_THROWS_AS(bicubic_upsample(lr, 1), ArgumentError);
  }

  TEST_CASE("objective at ground truth and nearby") {
    const ProblemSpec p = ac_problem();
    const GridSpec g = canonical_grid(p, 32, 32);
    const TimeSeries ts = solve_series(p, g, 0.4, 4, random_field(g, 7, -0.1, 0.1));
    SrOptions o = SrOptions::defaults_for(ProblemKind::AllenCahn);
    const SrInputs in{block_downsample(ts.frames[4], 8), {ts.frames[3], ts.frames[2]}, ts.tau, ts.time(4), p};
    const double at_gt = sr_objective(ts.frames[4], in, o);
    const double boundary_part = o.weights.w5 * physics_boundary_loss(ts.frames[4], nullptr, p.boundary);
    CHECK(at_gt - boundary_part <= o.weights.w4 * 1e-16);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const Field2D pert = ts.frames[4] + random_field(g, 900 + s, -1e-3, 1e-3);
      CHECK(sr_objective(pert, in, o) > at_gt);
    }
  }

  TEST_CASE("data term alone") {
    const Instance inst = random_instance(ProblemKind::AllenCahn, 40);
    SrOptions o;
    o.weights = LossWeights{0, 0, 0, 0, 0};
    Field2D match = inst.u;
    const Field2D d = block_downsample(inst.u, 2);
    // Shift each block so that its mean equals the target.
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) match(i, j) += inst.in.u_lr(i / 2, j / 2) - d(i / 2, j / 2);
    CHECK(sr_objective(match, inst.in, o) < 1e-30);
    double gmax = 0;
    const Field2D g_match = sr_gradient(match, inst.in, o);
    for (double v : g_match.values()) gmax = std::max(gmax, std::abs(v));
    CHECK(gmax < 1e-9);

    const Field2D grad = sr_gradient(inst.u, inst.in, o);
    Field2D expect = block_downsample_adjoint((d - inst.in.u_lr.with_grid(d.grid())) * (2.0 / 64), 2);
    CHECK(field_linf_diff(grad, expect.with_grid(grad.grid())) < 1e-15);
    for (std::size_t p = 0; p < 256; p += 17) {
      auto f = [&](double h) {
        Field2D v = inst.u;
        v[p] += h;
        return sr_objective(v, inst.in, o);
      };
      const double fd = (f(1e-6) - f(-1e-6)) / 2e-6;
      CHECK(grad[p] == doctest::Approx(fd).epsilon(1e-6));
    }
  }

  TEST_CASE("analytic gradient matches finite differences for every problem and scheme") {
    std::mt19937_64 pick(5);
    double worst = 0;
    int inst_id = 0;
    for (ProblemKind kind : {ProblemKind::AllenCahn, ProblemKind::ErikssonJohnson}) {
      for (SchemeKind sk : {SchemeKind::BDF2, SchemeKind::CN, SchemeKind::EE}) {
        const Instance inst = random_instance(kind, 1000 + 10 * inst_id++);
        SrOptions o = SrOptions::defaults_for(kind);
        o.scheme = scheme_spec(sk);
        o.weights.w5 = 3.0;
        const Field2D grad = sr_gradient(inst.u, inst.in, o);
        for (int k = 0; k < 20; ++k) {
          const std::size_t p = pick() % inst.u.size();
          const double fd = fd_component(inst.u, p, inst.in, o);
          const double rel = std::abs(grad[p] - fd) / (std::abs(fd) + 1e-12);
          worst = std::max(worst, rel);
        }
      }
    }
    CHECK(worst < 1e-6);
  }

  TEST_CASE("residual support is the five-point neighbourhood") {
    const Instance inst = random_instance(ProblemKind::AllenCahn, 70);
    SrOptions o = SrOptions::defaults_for(ProblemKind::AllenCahn);
    o.lambda_data = 0;
    o.weights.w5 = 0;
    const std::size_t pi = 8, pj = 8;
    const Field2D g0 = sr_gradient(inst.u, inst.in, o);
    const SpatialOperator op(inst.in.problem, inst.u.grid(), o.mode);
    const Field2D r0 = scheme_residual(o.scheme, inst.u, inst.in.history, inst.in.tau, op);
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = 0; j < 16; ++j) {
        Field2D v = inst.u;
        v(i, j) += 0.05;
        const long di = std::abs(static_cast<long>(i) - 8), dj = std::abs(static_cast<long>(j) - 8);
        const Field2D r = scheme_residual(o.scheme, v, inst.in.history, inst.in.tau, op);
        if (di + dj > 1) CHECK(r(pi, pj) == r0(pi, pj));
        // The loss gradient couples residuals that share a stencil, so its reach is two cells.
        if (di + dj > 2) CHECK(sr_gradient(v, inst.in, o)(pi, pj) == g0(pi, pj));
      }
  }

  TEST_CASE("variational sr: fixed point, descent and determinism") {
    ProblemSpec p = ac_problem();
    p.theta = theta_from_reaction_ratio(0.55, p.K);
    const GridSpec g = canonical_grid(p, 32, 32);
    const SpatialOperator op(p, g, DerivativeMode::StandardFD);
    const double c = ac_equilibrium(op);
    CHECK(std::abs(op.reaction(c)) < 1e-9);
    const Field2D eq = field_constant(g, c);
    SrOptions o = SrOptions::defaults_for(ProblemKind::AllenCahn);
    SrInputs in{block_downsample(eq, 8), {eq, eq}, 0.4, 0.8, p};
    const SrResult fixed = variational_sr(in, o);
    CHECK(field_linf_diff(fixed.u_hr, eq) < 1e-9);

    const TimeSeries ts = solve_series(p, g, 0.4, 6, random_field(g, 8, -0.1, 0.1));
    o.max_iters = 200;
    in = SrInputs{block_downsample(ts.frames[6], 8), {ts.frames[5], ts.frames[4]}, ts.tau, ts.time(6), p};
    const SrResult a = variational_sr(in, o);
    const SrResult b = variational_sr(in, o);
    REQUIRE(!a.objective_trace.empty());
    CHECK(a.objective_trace.back() <= a.objective_trace.front());
    for (std::size_t k = 11; k < a.objective_trace.size(); ++k) CHECK(a.objective_trace[k] <= a.objective_trace[k - 1]);
    CHECK(field_linf_diff(a.u_hr, b.u_hr) == 0.0);
    CHECK(a.objective_trace == b.objective_trace);
    CHECK(a.iters_used <= 200);
    for (double v : a.u_hr.values()) CHECK(std::abs(v) <= kAllenCahnBound);
    const Field2D init = clamp_allen_cahn(bicubic_upsample(in.u_lr, 8));
    CHECK(sr_objective(a.u_hr, in, o) <= sr_objective(init.with_grid(g), in, o));
  }

  TEST_CASE("variational sr beats bicubic on a solver frame") {
    ProblemSpec p = ac_problem();
    p.epsilon = 4e-3;
    p.theta = theta_from_reaction_ratio(0.55, p.K);
    const GridSpec g = canonical_grid(p, 64, 64);
    const TimeSeries ts = solve_series(p, g, 0.4, 12, random_field(g, 9, -0.1, 0.1));
    const SrInputs in{block_downsample(ts.frames[12], 8), {ts.frames[11], ts.frames[10]}, ts.tau, ts.time(12), p};
    const SrResult r = variational_sr(in, SrOptions::defaults_for(ProblemKind::AllenCahn));
    const Field2D bic = clamp_allen_cahn(bicubic_upsample(in.u_lr, 8)).with_grid(g);
    CHECK(msge(ts.frames[12], r.u_hr, DerivativeMode::StandardFD, p.boundary) <
          msge(ts.frames[12], bic, DerivativeMode::StandardFD, p.boundary));
    CHECK(psnr(ts.frames[12], r.u_hr) > psnr(ts.frames[12], bic));
  }

  TEST_CASE("errors") {
    const Instance inst = random_instance(ProblemKind::ErikssonJohnson, 80);
    SrOptions o = SrOptions::defaults_for(ProblemKind::ErikssonJohnson);
    SrInputs short_hist = inst.in;
    short_hist.history.resize(1);
    CHECK_THROWS_AS(variational_sr(short_hist, o), HistoryError);
    SrOptions bad = o;
    bad.max_iters = 0;
    CHECK_THROWS_AS(variational_sr(inst.in, bad), ArgumentError);
    bad = o;
    bad.learning_rate = 0;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = o;
    bad.precondition = false;
    bad.learning_rate = 1e300;
    bad.max_iters = 5;
    CHECK_THROWS_AS(variational_sr(inst.in, bad), OptimizationError);
    Instance ac = random_instance(ProblemKind::AllenCahn, 90);
    ac.u[3] = 1.0;
    CHECK_THROWS_AS(sr_gradient(ac.u, ac.in, SrOptions::defaults_for(ProblemKind::AllenCahn)), DomainError);
  }
}
