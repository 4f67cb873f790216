#pragma once

// Implicit BDF2 time stepping (backward-Euler bootstrap) with damped Newton.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pcsr/grid.hpp"
#include "pcsr/physics.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// Allen-Cahn frames are kept within [-kAllenCahnBound, kAllenCahnBound].
inline constexpr double kAllenCahnBound = 1.0 - 1e-2;

struct NewtonOptions {
  double tolerance = 1e-10;  // on ||G||_inf
  int max_iterations = 50;
};

/// One simulation run: frames[k] is the state at t0 + k * tau.
struct TimeSeries {
  ProblemSpec problem;
  double tau = 0.0;
  double t0 = 0.0;
  std::vector<Field2D> frames;

  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * tau; }
  const GridSpec& grid() const { return frames.front().grid(); }
  /// >= 3 frames on one grid, tau > 0, Allen-Cahn frames within the clamp.
  void validate() const;
};

/// Advances a fixed problem on a fixed grid. Holds its own Newton workspace,
/// so one instance must not be shared between threads.
class BdfStepper {
 public:
  BdfStepper(const ProblemSpec& problem, const GridSpec& grid,
             DerivativeMode mode = DerivativeMode::StandardFD, NewtonOptions options = {});
  ~BdfStepper();
  BdfStepper(BdfStepper&&) noexcept;
  BdfStepper& operator=(BdfStepper&&) noexcept;

  /// history[0] is frame n-1, history[1] (optional) frame n-2. With a single
  /// frame the step is backward Euler, otherwise BDF2:
  ///   3/(2 tau) u - 2/tau u_{n-1} + 1/(2 tau) u_{n-2} + f(u) = 0.
  /// For Dirichlet problems the boundary ring is pinned to the analytic
  /// trace at t_new. Throws SolverError when Newton stalls.
  Field2D step(std::span<const Field2D> history, double tau, double t_new);

  /// Newton iterations used by the last call to step().
  int last_iterations() const noexcept;
  /// ||G||_inf at the end of the last call to step().
  double last_residual() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Free-function form of BdfStepper::step.
Field2D step_solver(std::span<const Field2D> history, double tau, const ProblemSpec& problem,
                    double t_new, DerivativeMode mode = DerivativeMode::StandardFD);

/// Runs n_steps steps from `ic` (frame 0 at time t0). Allen-Cahn frames are
/// clamped to [-0.99, 0.99]. For Eriksson-Johnson the boundary ring of `ic`
/// must match the analytic trace at t0. Throws SolverError carrying the
/// failing step index.
TimeSeries solve_series(const ProblemSpec& problem, const GridSpec& grid, double tau,
                        std::size_t n_steps, const Field2D& ic, double t0 = 0.0,
                        DerivativeMode mode = DerivativeMode::StandardFD);

/// Continues an existing trajectory: `start` holds the last one or two states
/// (oldest first), the result holds `n_steps` new frames (without `start`).
std::vector<Field2D> continue_run(const ProblemSpec& problem, std::span<const Field2D> start,
                                  double tau, double t_start, std::size_t n_steps,
                                  DerivativeMode mode = DerivativeMode::StandardFD);

/// Clamp used for Allen-Cahn states.
Field2D clamp_allen_cahn(Field2D u);

}  // namespace pcsr
