#pragma once

// Pixel, physics-inner and physics-boundary losses and their weighted sum.

#include <span>

#include "pcsr/grid.hpp"
#include "pcsr/integrators.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// Weights of the composite loss. w2 and w3 belong to the adversarial and
/// perceptual terms of a GAN objective; they are carried for completeness and
/// never used.
struct LossWeights {
  double w1 = 1.0;   // pixel
  double w2 = 0.0;   // inert
  double w3 = 0.0;   // inert
  double w4 = 1e-8;  // physics inner
  double w5 = 5.0;   // physics boundary

  /// Allen-Cahn: w1 = 1, w4 = 1e-8, w5 = 5. Eriksson-Johnson: w1 = 1,
  /// w4 = 1e-2, w5 = 100.
  static LossWeights defaults_for(ProblemKind problem);
  /// Throws ArgumentError on negative or non-finite w1, w4, w5.
  void validate() const;
};

struct LossReport {
  double pixel = 0.0;
  double inner = 0.0;
  double boundary = 0.0;
  double composite = 0.0;
  LossWeights weights;
};

/// Mean of (a - b)^2 over all pixels.
double pixel_loss(const Field2D& u_sr, const Field2D& u_gt);

/// Per-pixel scheme residual of u_sr_n against previous frames
/// (history[0] = frame n-1).
Field2D physics_residual(const Field2D& u_sr_n, std::span<const Field2D> history, double tau,
                         const ProblemSpec& problem, const SchemeSpec& scheme,
                         DerivativeMode mode = DerivativeMode::StandardFD);

/// Mean square of physics_residual over interior pixels (outer frame excluded).
double physics_inner_loss(const Field2D& u_sr_n, std::span<const Field2D> history, double tau,
                          const ProblemSpec& problem, const SchemeSpec& scheme,
                          DerivativeMode mode = DerivativeMode::StandardFD);

/// Dirichlet: sum over the four sides of MSE(u_sr side, u_gt side).
/// Periodic: MSE(left, right) + MSE(top, bottom) of u_sr.
/// Neumann: sum over sides of MSE(side, first interior line) of u_sr.
/// Corners sit in two side vectors and count twice.
/// Throws ArgumentError for Dirichlet without u_gt.
double physics_boundary_loss(const Field2D& u_sr, const Field2D* u_gt, BoundaryKind bc);

LossReport composite_loss(const Field2D& u_sr, const Field2D& u_gt,
                          std::span<const Field2D> history, double tau, const ProblemSpec& problem,
                          const SchemeSpec& scheme, const LossWeights& weights,
                          DerivativeMode mode = DerivativeMode::StandardFD);

}  // namespace pcsr
