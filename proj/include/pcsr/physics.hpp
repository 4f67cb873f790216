#pragma once

// Spatial operators f(u; eps, K, r, theta) for the two model problems, the
// Allen-Cahn interface constant and free energy, and the Eriksson-Johnson
// analytic data.

#include <vector>

#include "pcsr/grid.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// (1/64) / (2 sqrt(2) tanh(0.9))  or  (1/64) / (2 sqrt(2) atanh(0.9)).
double interface_constant(InterfaceVariant variant = InterfaceVariant::Appendix);

/// -eps L(u) + (0.5/E^2) K theta ln((1+u)/(1-u)) - 1.2 u, L per `mode`.
/// Throws DomainError if |u| >= 1 anywhere, ArgumentError for Dirichlet bc.
Field2D f_allen_cahn(const Field2D& u, double eps, double K, double theta, DerivativeMode mode,
                     BoundaryKind bc, InterfaceVariant variant = InterfaceVariant::Appendix);

/// -eps L(u) + r cos(theta) Dx u + r sin(theta) Dy u + K u (u - 1).
/// Throws ArgumentError when bc is Dirichlet and no pad is given.
Field2D f_eriksson_johnson(const Field2D& u, double eps, double K, double r, double theta,
                           DerivativeMode mode, BoundaryKind bc, const Field2D* dirichlet_pad);

/// d/dphi of (1/(2T))((1+phi)ln(1+phi) + (1-phi)ln(1-phi)) - Tc phi^2 / 2.
double helmholtz_dphi(double phi, double T, double Tc);

/// Free-energy form of the Allen-Cahn operator,
///   f = M (-Lap u + Phi'(u; T, Tc) / eps_g^2),
/// tied to the (eps, K, theta) parametrisation by M = eps, eps_g = E,
/// 1/T = K theta / eps and Tc = 1.2 E^2 / eps. Under that map the two forms
/// are the same function of u.
struct AllenCahnThermo {
  double mobility = 0.0;
  double temperature = 0.0;
  double critical_temperature = 0.0;
  double gradient_coefficient = 0.0;
};

/// Throws DomainError when K*theta <= 0 (no finite temperature).
AllenCahnThermo thermo_from_problem(const ProblemSpec& p);
/// Inverse map for a given mobility/temperature and K; returns theta.
double theta_from_temperature(double mobility, double temperature, double K,
                              InterfaceVariant variant = InterfaceVariant::Appendix);
/// theta such that K theta / E^2 equals `ratio` (the linear stability of u = 0
/// is governed by ratio - 1.2; the problem phase-separates when ratio < 1.2).
double theta_from_reaction_ratio(double ratio, double K,
                                 InterfaceVariant variant = InterfaceVariant::Appendix);

struct EJAnalyticParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// lambda_{1,2} = (-1 +- sqrt(1 - 4 eps l)) / (-2 eps),
/// delta_{1,2}  = (1 +- sqrt(1 + 4 pi^2 eps^2)) / (2 eps).
/// Throws DomainError for eps <= 0 or a negative discriminant.
EJAnalyticParams ej_analytic_params(double eps, double l);

double ej_boundary_value(double x, double y, double t, const EJAnalyticParams& p);
double ej_initial_value(double x, double y, const EJAnalyticParams& p);

/// Analytic field at time t on `grid` (uses l = K).
Field2D ej_analytic_field(const GridSpec& grid, const ProblemSpec& problem, double t);

/// The spatial operator of a problem on a fixed grid, split into a linear
/// stencil part and a pointwise reaction:  f(u) = A u + g(u).
class SpatialOperator {
 public:
  SpatialOperator(const ProblemSpec& problem, const GridSpec& grid, DerivativeMode mode);

  const ProblemSpec& problem() const noexcept { return problem_; }
  const GridSpec& grid() const noexcept { return grid_; }
  DerivativeMode mode() const noexcept { return mode_; }

  /// f(u). For Dirichlet problems a null pad means the field pads itself
  /// (ghosts replicate the field's own edge values).
  Field2D apply(const Field2D& u, const Field2D* dirichlet_pad = nullptr) const;
  /// A u only.
  Field2D apply_linear(const Field2D& u, const Field2D* dirichlet_pad = nullptr) const;
  /// A^T w.
  Field2D linear_adjoint(const Field2D& w) const;
  /// Nonzeros of coef * A.
  void append_linear_entries(double coef, std::vector<StencilEntry>& out) const;

  double reaction(double u) const;
  double reaction_derivative(double u) const;

 private:
  ProblemSpec problem_;
  GridSpec grid_;
  DerivativeMode mode_;
  Kernel3x3 lap_;
  Kernel3x3 dx_;
  Kernel3x3 dy_;
  double log_coef_ = 0.0;  // (0.5/E^2) K theta
};

}  // namespace pcsr
