#include "pcsr/sr_optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "pcsr/errors.hpp"
#include "pcsr/physics.hpp"
#include "pcsr/solver.hpp"

namespace pcsr {
namespace {

void check_factor(const GridSpec& g, std::size_t factor) {
  if (factor == 0 || g.nx % factor != 0 || g.ny % factor != 0) {
    throw ShapeError("grid " + std::to_string(g.nx) + "x" + std::to_string(g.ny) +
                     " is not divisible by factor " + std::to_string(factor));
  }
}

GridSpec coarsen_grid(const GridSpec& fine, std::size_t f) {
  const double df = static_cast<double>(f);
  GridSpec g{fine.nx / f, fine.ny / f, fine.hx * df, fine.hy * df, 0.0, 0.0};
  g.x0 = fine.x0 - 0.5 * fine.hx + 0.5 * g.hx;
  g.y0 = fine.y0 - 0.5 * fine.hy + 0.5 * g.hy;
  return g;
}

std::array<double, 4> catmull_rom(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t),
          0.5 * (t3 - t2)};
}

std::size_t sr_factor(const Field2D& u, const Field2D& u_lr) {
  if (u_lr.nx() == 0 || u.nx() % u_lr.nx() != 0 || u.ny() % u_lr.ny() != 0 ||
      u.nx() / u_lr.nx() != u.ny() / u_lr.ny()) {
    throw ShapeError("fine and coarse grids are not related by an integer factor");
  }
  return u.nx() / u_lr.nx();
}

Field2D project(Field2D u, const SrOptions& o) {
  for (double& v : u.values()) v = std::clamp(v, o.clamp_lo, o.clamp_hi);
  return u;
}

struct Terms {
  double value = 0.0;
  Field2D grad;
};

// Objective and (optionally) its gradient in one pass.
Terms evaluate(const Field2D& u, const SrInputs& in, const SrOptions& o, bool want_grad) {
  const std::size_t f = sr_factor(u, in.u_lr);
  const GridSpec& g = u.grid();
  Terms t;
  if (want_grad) t.grad = Field2D(g);

  if (o.lambda_data != 0.0) {
    Field2D d = block_downsample(u, f);
    d -= in.u_lr.with_grid(d.grid());
    double acc = 0.0;
    for (double v : d.values()) acc += v * v;
    const double n = static_cast<double>(d.size());
    t.value += o.lambda_data * acc / n;
    if (want_grad) {
      d *= 2.0 * o.lambda_data / n;
      t.grad += block_downsample_adjoint(d, f).with_grid(g);
    }
  }

  const LossWeights& w = o.weights;
  if (w.w4 != 0.0) {
    const SpatialOperator op(in.problem, g, o.mode);
    Field2D r = scheme_residual(o.scheme, u, in.history, in.tau, op);
    for (std::size_t i = 0; i < g.ny; ++i) {
      for (std::size_t j = 0; j < g.nx; ++j) {
        if (!is_interior(g, i, j)) r(i, j) = 0.0;
      }
    }
    double acc = 0.0;
    for (double v : r.values()) acc += v * v;
    const double n = static_cast<double>(interior_count(g));
    t.value += w.w4 * acc / n;
    if (want_grad) {
      // dR/du = c_t I + b_s (A + diag g'(u)) with masked residual m.
      const double sig1 = o.scheme.beta_sum();
      const double c_t = o.scheme.alphas.back() / (in.tau * sig1);
      const double b_s = o.scheme.betas.back() / sig1;
      r *= 2.0 * w.w4 / n;
      Field2D gr = r * c_t;
      if (b_s != 0.0) {
        const Field2D at = op.linear_adjoint(r);
        for (std::size_t p = 0; p < gr.size(); ++p) {
          gr[p] += b_s * (at[p] + op.reaction_derivative(u[p]) * r[p]);
        }
      }
      t.grad += gr;
    }
  }

  if (w.w5 != 0.0) {
    constexpr Side kSides[] = {Side::Left, Side::Right, Side::Top, Side::Bottom};
    auto side_len = [&](Side s) { return (s == Side::Left || s == Side::Right) ? g.ny : g.nx; };
    // Accumulates w5 * mean((u[a] - target)^2) along one side pair.
    auto pair_term = [&](Side sa, std::size_t off_a, const Field2D& fb, Side sb, std::size_t off_b,
                         bool b_is_u) {
      const std::size_t n = side_len(sa);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t ia = boundary_index(g, sa, off_a, k);
        const std::size_t ib = boundary_index(g, sb, off_b, k);
        const double d = u[ia] - fb[ib];
        acc += d * d;
        if (want_grad) {
          const double gd = w.w5 * 2.0 * d / static_cast<double>(n);
          t.grad[ia] += gd;
          if (b_is_u) t.grad[ib] -= gd;
        }
      }
      t.value += w.w5 * acc / static_cast<double>(n);
    };
    switch (in.problem.boundary) {
      case BoundaryKind::Dirichlet: {
        const Field2D target = ej_analytic_field(g, in.problem, in.t_n);
        for (Side s : kSides) pair_term(s, 0, target, s, 0, false);
        break;
      }
      case BoundaryKind::Periodic:
        pair_term(Side::Left, 0, u, Side::Right, 0, true);
        pair_term(Side::Top, 0, u, Side::Bottom, 0, true);
        break;
      case BoundaryKind::Neumann:
        for (Side s : kSides) pair_term(s, 0, u, s, 1, true);
        break;
    }
  }
  return t;
}

// u = P z with P = (I + s A)^{-1}, s = b_s / c_t: the linear part of the
// scheme Jacobian, normalised so that P is close to the identity on smooth
// modes and damps the stiff ones.
class Preconditioner {
 public:
  Preconditioner(const SpatialOperator& op, double s) : grid_(op.grid()), active_(s != 0.0) {
    if (!active_) return;
    const auto n = static_cast<Eigen::Index>(grid_.size());
    std::vector<StencilEntry> entries;
    op.append_linear_entries(s, entries);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(entries.size() + grid_.size());
    for (const StencilEntry& e : entries) {
      trips.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col), e.value);
    }
    for (Eigen::Index k = 0; k < n; ++k) trips.emplace_back(k, k, 1.0);
    m_.resize(n, n);
    m_.setFromTriplets(trips.begin(), trips.end());
    m_.makeCompressed();
    mt_ = m_.transpose();
    symmetric_ = (m_ - mt_).norm() == 0.0;
    bool ok;
    if (symmetric_) {
      ldlt_.compute(m_);
      ok = ldlt_.info() == Eigen::Success;
    } else {
      lu_.compute(m_);
      lut_.compute(mt_);
      ok = lu_.info() == Eigen::Success && lut_.info() == Eigen::Success;
    }
    if (!ok) throw OptimizationError("preconditioner factorisation failed", 0);
  }

  Field2D apply(const Field2D& z) const {
    if (!active_) return z;
    return symmetric_ ? solve(ldlt_, z) : solve(lu_, z);
  }
  Field2D apply_transpose(const Field2D& g) const {
    if (!active_) return g;
    return symmetric_ ? solve(ldlt_, g) : solve(lut_, g);
  }
  Field2D inverse(const Field2D& u) const {
    if (!active_) return u;
    Eigen::VectorXd x = m_ * view(u);
    return Field2D(u.grid(), std::vector<double>(x.data(), x.data() + x.size()));
  }

 private:
  static Eigen::Map<const Eigen::VectorXd> view(const Field2D& f) {
    return {f.values().data(), static_cast<Eigen::Index>(f.size())};
  }
  template <typename Solver>
  static Field2D solve(const Solver& solver, const Field2D& b) {
    Eigen::VectorXd x = solver.solve(view(b));
    return Field2D(b.grid(), std::vector<double>(x.data(), x.data() + x.size()));
  }

  GridSpec grid_;
  bool active_;
  bool symmetric_ = false;
  Eigen::SparseMatrix<double> m_, mt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

}  // namespace

Field2D block_downsample(const Field2D& u_hr, std::size_t factor) {
  check_factor(u_hr.grid(), factor);
  const GridSpec cg = coarsen_grid(u_hr.grid(), factor);
  Field2D out(cg);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t i = 0; i < u_hr.ny(); ++i) {
    for (std::size_t j = 0; j < u_hr.nx(); ++j) out(i / factor, j / factor) += u_hr(i, j);
  }
  out *= inv;
  return out;
}

Field2D block_downsample_adjoint(const Field2D& v_lr, std::size_t factor) {
  if (factor == 0) throw ShapeError("factor must be positive");
  Field2D out(refine_grid(v_lr.grid(), factor));
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (std::size_t i = 0; i < out.ny(); ++i) {
    for (std::size_t j = 0; j < out.nx(); ++j) out(i, j) = v_lr(i / factor, j / factor) * inv;
  }
  return out;
}

GridSpec refine_grid(const GridSpec& coarse, std::size_t factor) {
  const double df = static_cast<double>(factor);
  GridSpec g{coarse.nx * factor, coarse.ny * factor, coarse.hx / df, coarse.hy / df, 0.0, 0.0};
  g.x0 = coarse.x0 - 0.5 * coarse.hx + 0.5 * g.hx;
  g.y0 = coarse.y0 - 0.5 * coarse.hy + 0.5 * g.hy;
  return g;
}

Field2D bicubic_upsample(const Field2D& u_lr, std::size_t factor) {
  if (factor < 2) throw ArgumentError("bicubic_upsample: factor must be >= 2");
  const GridSpec& cg = u_lr.grid();
  Field2D out(refine_grid(cg, factor));
  const long nx = static_cast<long>(cg.nx);
  const long ny = static_cast<long>(cg.ny);
  auto at = [&](long i, long j) {
    return u_lr(static_cast<std::size_t>(std::clamp(i, 0L, ny - 1)),
                static_cast<std::size_t>(std::clamp(j, 0L, nx - 1)));
  };
  const double df = static_cast<double>(factor);
  for (std::size_t I = 0; I < out.ny(); ++I) {
    const double sy = (static_cast<double>(I) + 0.5) / df - 0.5;
    const long iy = static_cast<long>(std::floor(sy));
    const auto wy = catmull_rom(sy - static_cast<double>(iy));
    for (std::size_t J = 0; J < out.nx(); ++J) {
      const double sx = (static_cast<double>(J) + 0.5) / df - 0.5;
      const long jx = static_cast<long>(std::floor(sx));
      const auto wx = catmull_rom(sx - static_cast<double>(jx));
      double acc = 0.0;
      for (int a = 0; a < 4; ++a) {
        double row = 0.0;
        for (int b = 0; b < 4; ++b) row += wx[b] * at(iy - 1 + a, jx - 1 + b);
        acc += wy[a] * row;
      }
      out(I, J) = acc;
    }
  }
  return out;
}

SrOptions SrOptions::defaults_for(ProblemKind problem) {
  SrOptions o;
  o.weights = LossWeights::defaults_for(problem);
  if (problem == ProblemKind::AllenCahn) {
    o.weights.w4 = 1e5;
    o.clamp_lo = -kAllenCahnBound;
    o.clamp_hi = kAllenCahnBound;
  }
  return o;
}

void SrOptions::validate() const {
  if (max_iters < 1) throw ArgumentError("max_iters must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ArgumentError("moment decays must lie in [0, 1)");
  }
  if (!(lambda_data >= 0.0)) throw ArgumentError("lambda_data must be >= 0");
  if (!(tolerance >= 0.0)) throw ArgumentError("tolerance must be >= 0");
  if (!(clamp_lo < clamp_hi)) throw ArgumentError("clamp bounds are inverted");
  weights.validate();
  scheme.validate();
}

double sr_objective(const Field2D& u, const SrInputs& in, const SrOptions& opts) {
  return evaluate(u, in, opts, false).value;
}

Field2D sr_gradient(const Field2D& u, const SrInputs& in, const SrOptions& opts) {
  return evaluate(u, in, opts, true).grad;
}

SrResult variational_sr(const SrInputs& in, const SrOptions& opts) {
  opts.validate();
  if (in.history.size() < opts.scheme.steps && opts.weights.w4 != 0.0) {
    throw HistoryError("variational_sr: not enough history frames for the scheme");
  }
  const GridSpec fine =
      in.history.empty() ? refine_grid(in.u_lr.grid(), 8) : in.history.front().grid();
  const std::size_t factor = fine.nx / in.u_lr.nx();
  Field2D u = project(bicubic_upsample(in.u_lr, factor), opts).with_grid(fine);

  // Adam runs on z with u = P z.
  const double stiff = opts.precondition && opts.weights.w4 != 0.0
                           ? opts.scheme.betas.back() * in.tau / opts.scheme.alphas.back()
                           : 0.0;
  const Preconditioner pre(SpatialOperator(in.problem, fine, opts.mode), stiff);
  Field2D z = pre.inverse(u);

  SrResult res;
  Terms cur = evaluate(u, in, opts, true);
  if (!std::isfinite(cur.value)) throw OptimizationError("non-finite objective", 0);

  std::vector<double> m(u.size(), 0.0);
  std::vector<double> v(u.size(), 0.0);
  double lr = opts.learning_rate;
  double b1t = 1.0;
  double b2t = 1.0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    res.objective_trace.push_back(cur.value);
    double gmax = 0.0;
    for (double gv : cur.grad.values()) gmax = std::max(gmax, std::abs(gv));
    if (gmax < opts.tolerance) {
      res.converged = true;
      break;
    }
    const Field2D gz = pre.apply_transpose(cur.grad);
    b1t *= opts.beta1;
    b2t *= opts.beta2;
    Field2D cand_z = z;
    for (std::size_t p = 0; p < u.size(); ++p) {
      m[p] = opts.beta1 * m[p] + (1.0 - opts.beta1) * gz[p];
      v[p] = opts.beta2 * v[p] + (1.0 - opts.beta2) * gz[p] * gz[p];
      const double mh = m[p] / (1.0 - b1t);
      const double vh = v[p] / (1.0 - b2t);
      cand_z[p] -= lr * mh / (std::sqrt(vh) + 1e-12);
    }
    Field2D cand = pre.apply(cand_z);
    bool clamped = false;
    for (double& x : cand.values()) {
      const double c = std::clamp(x, opts.clamp_lo, opts.clamp_hi);
      clamped |= c != x;
      x = c;
    }
    if (clamped) cand_z = pre.inverse(cand);
    Terms next = evaluate(cand, in, opts, true);
    if (!std::isfinite(next.value)) throw OptimizationError("non-finite objective", it + 1);
    if (next.value <= cur.value) {
      u = std::move(cand);
      z = std::move(cand_z);
      cur = std::move(next);
    } else {
      lr *= 0.5;
      if (lr < 1e-14 * opts.learning_rate) break;
    }
  }
  res.iters_used = it;
  res.u_hr = std::move(u);
  return res;
}

}  // namespace pcsr
