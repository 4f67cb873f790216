#include "pcsr/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <array>
#include <optional>
#include <cmath>

#include "pcsr/errors.hpp"

namespace pcsr {

void TimeSeries::validate() const {
  if (frames.size() < 3) throw ArgumentError("time series needs at least 3 frames");
  if (!(tau > 0.0)) throw ArgumentError("time series needs tau > 0");
  for (const Field2D& f : frames) {
    if (!(f.grid() == frames.front().grid())) throw ShapeError("time series frames differ in grid");
    if (problem.problem == ProblemKind::AllenCahn) {
      for (double v : f.values()) {
        if (std::abs(v) > kAllenCahnBound) throw DomainError("Allen-Cahn frame outside clamp bounds");
      }
    }
  }
}

Field2D clamp_allen_cahn(Field2D u) {
  for (double& v : u.values()) v = std::clamp(v, -kAllenCahnBound, kAllenCahnBound);
  return u;
}

struct BdfStepper::Impl {
  ProblemSpec problem;
  GridSpec grid;
  SpatialOperator op;
  NewtonOptions options;
  std::vector<StencilEntry> linear_entries;
  std::vector<bool> pinned;  // Dirichlet ring
  bool use_thermo = false;
  AllenCahnThermo thermo{};
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  bool pattern_ready = false;
  int last_iterations = 0;
  double last_residual = 0.0;

  Impl(const ProblemSpec& p, const GridSpec& g, DerivativeMode mode, NewtonOptions opts)
      : problem(p), grid(g), op(p, g, mode), options(opts), pinned(g.size(), false) {
    op.append_linear_entries(1.0, linear_entries);
    if (p.boundary == BoundaryKind::Dirichlet) {
      for (std::size_t i = 0; i < g.ny; ++i)
        for (std::size_t j = 0; j < g.nx; ++j) pinned[i * g.nx + j] = !is_interior(g, i, j);
    }
    if (p.problem == ProblemKind::AllenCahn && p.K * p.theta > 0.0) {
      use_thermo = true;
      thermo = thermo_from_problem(p);
    }
  }

  // Allen-Cahn reaction in free-energy form M Phi'(u) / eps_g^2.
  double reaction(double u) const {
    if (use_thermo) {
      const double eg = thermo.gradient_coefficient;
      return thermo.mobility / (eg * eg) *
             helmholtz_dphi(u, thermo.temperature, thermo.critical_temperature);
    }
    return op.reaction(u);
  }

  double reaction_derivative(double u) const {
    if (use_thermo) {
      const double eg = thermo.gradient_coefficient;
      return thermo.mobility / (eg * eg) *
             (1.0 / (thermo.temperature * (1.0 - u * u)) - thermo.critical_temperature);
    }
    return op.reaction_derivative(u);
  }

  // G(u) = c u + hist + f(u) on free pixels, u - g on pinned pixels.
  Field2D residual(const Field2D& u, double c, const Field2D& hist, const Field2D* trace) const {
    Field2D G = op.apply_linear(u);
    for (std::size_t k = 0; k < G.size(); ++k) {
      if (pinned[k]) {
        G[k] = u[k] - (*trace)[k];
      } else {
        G[k] += c * u[k] + hist[k] + reaction(u[k]);
      }
    }
    return G;
  }

  void factorize(const Field2D& u, double c) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(linear_entries.size() + grid.size());
    for (const StencilEntry& e : linear_entries) {
      if (!pinned[e.row]) trips.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = pinned[k] ? 1.0 : c + reaction_derivative(u[k]);
      trips.emplace_back(static_cast<int>(k), static_cast<int>(k), d);
    }
    const int n = static_cast<int>(grid.size());
    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(trips.begin(), trips.end());
    J.makeCompressed();
    if (!pattern_ready) {
      lu.analyzePattern(J);
      pattern_ready = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw SolverError("singular Newton Jacobian", -1.0);
  }
};

BdfStepper::BdfStepper(const ProblemSpec& problem, const GridSpec& grid, DerivativeMode mode,
                       NewtonOptions options)
    : impl_(std::make_unique<Impl>(problem, grid, mode, options)) {}
BdfStepper::~BdfStepper() = default;
BdfStepper::BdfStepper(BdfStepper&&) noexcept = default;
BdfStepper& BdfStepper::operator=(BdfStepper&&) noexcept = default;

int BdfStepper::last_iterations() const noexcept { return impl_->last_iterations; }
double BdfStepper::last_residual() const noexcept { return impl_->last_residual; }

namespace {

double inf_norm(const Field2D& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double two_norm(const Field2D& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Field2D BdfStepper::step(std::span<const Field2D> history, double tau, double t_new) {
  Impl& m = *impl_;
  if (history.empty()) throw HistoryError("step_solver needs at least one previous frame");
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
  for (const Field2D& h : history) {
    if (!h.grid().same_shape(m.grid)) throw ShapeError("step_solver: history grid mismatch");
  }
  const bool bdf2 = history.size() >= 2;
  const double c = bdf2 ? 1.5 / tau : 1.0 / tau;
  Field2D hist(m.grid);
  for (std::size_t k = 0; k < hist.size(); ++k) {
    hist[k] = bdf2 ? (-2.0 * history[0][k] + 0.5 * history[1][k]) / tau : -history[0][k] / tau;
  }

  Field2D trace;
  const Field2D* trace_ptr = nullptr;
  if (m.problem.boundary == BoundaryKind::Dirichlet) {
    trace = ej_analytic_field(m.grid, m.problem, t_new);
    trace_ptr = &trace;
  }

  Field2D u = history[0].with_grid(m.grid);
  if (trace_ptr != nullptr) {
    for (std::size_t k = 0; k < u.size(); ++k)
      if (m.pinned[k]) u[k] = trace[k];
  }
  const bool bounded = m.problem.problem == ProblemKind::AllenCahn;

  Field2D G = m.residual(u, c, hist, trace_ptr);
  double gnorm = inf_norm(G);
  int it = 0;
  while (gnorm >= m.options.tolerance) {
    if (it >= m.options.max_iterations) {
      m.last_iterations = it;
      m.last_residual = gnorm;
      throw SolverError("Newton did not converge in " + std::to_string(it) +
                            " iterations, ||G||_inf = " + std::to_string(gnorm),
                        gnorm);
    }
    m.factorize(u, c);
    Eigen::Map<const Eigen::VectorXd> g(G.values().data(), static_cast<Eigen::Index>(G.size()));
    Eigen::VectorXd du = -m.lu.solve(g);

    double s = 1.0;
    if (bounded) {
      // Stay strictly inside (-1, 1).
      for (std::size_t k = 0; k < u.size(); ++k) {
        const double target = u[k] + du[static_cast<Eigen::Index>(k)];
        if (std::abs(target) >= 1.0) {
          const double room = 1.0 - std::abs(u[k]);
          s = std::min(s, 0.5 * room / std::abs(du[static_cast<Eigen::Index>(k)]));
        }
      }
    }
    const double g2 = two_norm(G);
    Field2D trial(m.grid);
    Field2D Gt;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t k = 0; k < u.size(); ++k) trial[k] = u[k] + s * du[static_cast<Eigen::Index>(k)];
      Gt = m.residual(trial, c, hist, trace_ptr);
      if (two_norm(Gt) <= (1.0 - 1e-4 * s) * g2 || inf_norm(Gt) < m.options.tolerance) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    ++it;
    if (!accepted) {
      // Roundoff floor: accept a non-increasing full step once we are close.
      if (two_norm(Gt) <= g2 && gnorm < 1e3 * m.options.tolerance) {
        accepted = true;
      } else {
        m.last_iterations = it;
        m.last_residual = gnorm;
        throw SolverError("Newton line search failed, ||G||_inf = " + std::to_string(gnorm), gnorm);
      }
    }
    u = std::move(trial);
    G = std::move(Gt);
    gnorm = inf_norm(G);
  }
  m.last_iterations = it;
  m.last_residual = gnorm;
  return u;
}

Field2D step_solver(std::span<const Field2D> history, double tau, const ProblemSpec& problem,
                    double t_new, DerivativeMode mode) {
  if (history.empty()) throw HistoryError("step_solver needs at least one previous frame");
  BdfStepper stepper(problem, history[0].grid(), mode);
  return stepper.step(history, tau, t_new);
}

std::vector<Field2D> continue_run(const ProblemSpec& problem, std::span<const Field2D> start,
                                  double tau, double t_start, std::size_t n_steps,
                                  DerivativeMode mode) {
  if (start.empty()) throw HistoryError("continue_run needs at least one start frame");
  BdfStepper stepper(problem, start.back().grid(), mode);
  std::vector<Field2D> out;
  out.reserve(n_steps);
  // prev1 = most recent, prev2 = one before.
  Field2D prev1 = start.back();
  std::optional<Field2D> prev2;
  if (start.size() >= 2) prev2 = start[start.size() - 2];
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t = t_start + static_cast<double>(k) * tau;
    Field2D next;
    try {
      if (prev2) {
        const std::array<Field2D, 2> hist{prev1, *prev2};
        next = stepper.step(hist, tau, t);
      } else {
        next = stepper.step(std::span(&prev1, 1), tau, t);
      }
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at step " + std::to_string(k), e.residual_norm(),
                        static_cast<long>(k));
    }
    if (problem.problem == ProblemKind::AllenCahn) next = clamp_allen_cahn(std::move(next));
    prev2 = std::move(prev1);
    prev1 = next;
    out.push_back(std::move(next));
  }
  return out;
}

TimeSeries solve_series(const ProblemSpec& problem, const GridSpec& grid, double tau,
                        std::size_t n_steps, const Field2D& ic, double t0, DerivativeMode mode) {
  problem.validate();
  if (!ic.grid().same_shape(grid)) throw ShapeError("solve_series: initial condition grid mismatch");
  if (n_steps < 2) throw ArgumentError("solve_series: need at least 2 steps");
  Field2D u0 = ic.with_grid(grid);
  if (problem.problem == ProblemKind::AllenCahn) {
    u0 = clamp_allen_cahn(std::move(u0));
  } else {
    const Field2D trace = ej_analytic_field(grid, problem, t0);
    for (std::size_t i = 0; i < grid.ny; ++i) {
      for (std::size_t j = 0; j < grid.nx; ++j) {
        if (is_interior(grid, i, j)) continue;
        if (std::abs(u0(i, j) - trace(i, j)) > 1e-9 * (1.0 + std::abs(trace(i, j)))) {
          throw ArgumentError("solve_series: initial boundary trace does not match Dirichlet data");
        }
      }
    }
  }
  TimeSeries ts;
  ts.problem = problem;
  ts.tau = tau;
  ts.t0 = t0;
  ts.frames.reserve(n_steps + 1);
  ts.frames.push_back(u0);
  std::vector<Field2D> rest = continue_run(problem, std::span(&u0, 1), tau, t0, n_steps, mode);
  for (Field2D& f : rest) ts.frames.push_back(std::move(f));
  return ts;
}

}  // namespace pcsr
