#pragma once

// Variational super-resolution: find a fine field whose block means match a
// coarse frame while satisfying the time-discrete PDE against previous fine
// frames.

#include <cstddef>
#include <span>
#include <vector>

#include "pcsr/grid.hpp"
#include "pcsr/integrators.hpp"
#include "pcsr/losses.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// Mean of each factor x factor block. Throws ShapeError unless both
/// dimensions are divisible by factor.
Field2D block_downsample(const Field2D& u_hr, std::size_t factor);
/// Adjoint of block_downsample: every fine pixel gets v / factor^2 from its block.
Field2D block_downsample_adjoint(const Field2D& v_lr, std::size_t factor);

/// Cell-centred refinement of a grid by `factor`.
GridSpec refine_grid(const GridSpec& coarse, std::size_t factor);

/// Catmull-Rom bicubic interpolation (a = -0.5) with edge-replicate padding.
/// Fine pixel I samples coarse coordinate (I + 0.5) / factor - 0.5.
/// Throws ArgumentError for factor < 2.
Field2D bicubic_upsample(const Field2D& u_lr, std::size_t factor);

struct SrOptions {
  int max_iters = 2000;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double lambda_data = 1.0;
  LossWeights weights;
  SchemeSpec scheme = scheme_spec(SchemeKind::BDF2);
  DerivativeMode mode = DerivativeMode::StandardFD;
  double tolerance = 1e-7;  // on the gradient infinity norm
  double clamp_lo = -1e300;
  double clamp_hi = 1e300;
  /// Run Adam on z with u = (I + (b/c) A)^{-1} z, where c and b are the time
  /// and operator coefficients of the newest frame in the scheme residual.
  bool precondition = true;

  /// Defaults used by the CLI and the experiments. Allen-Cahn: w4 = 1e5,
  /// w5 = 5, iterates clamped to +-0.99. Eriksson-Johnson: w4 = 1e-2,
  /// w5 = 100, unclamped.
  static SrOptions defaults_for(ProblemKind problem);
  /// Throws ArgumentError on max_iters < 1, lr <= 0, decay outside [0, 1),
  /// negative weights or clamp_lo >= clamp_hi.
  void validate() const;
};

/// Everything the objective needs besides the unknown field.
struct SrInputs {
  Field2D u_lr;
  std::vector<Field2D> history;  // fine frames, history[0] = n-1
  double tau = 0.0;
  double t_n = 0.0;  // frame time, for the analytic Dirichlet trace
  ProblemSpec problem;
};

/// lambda_data * mse(downsample(u), u_lr) + w4 * inner + w5 * boundary. For
/// Dirichlet problems the boundary target is the analytic trace at t_n.
double sr_objective(const Field2D& u, const SrInputs& in, const SrOptions& opts);
/// Exact gradient of sr_objective. Throws DomainError for Allen-Cahn when
/// |u| >= 1 somewhere.
Field2D sr_gradient(const Field2D& u, const SrInputs& in, const SrOptions& opts);

struct SrResult {
  Field2D u_hr;
  std::vector<double> objective_trace;  // objective at the iterate of each iteration
  bool converged = false;
  int iters_used = 0;
};

/// Adam from the clamped bicubic upsample. A step that would increase the
/// objective is rejected and the learning rate halved, so the trace never
/// increases. Throws OptimizationError on a non-finite objective.
SrResult variational_sr(const SrInputs& in, const SrOptions& opts);

}  // namespace pcsr
