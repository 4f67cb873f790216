#pragma once

// Time-integrator residuals and linear-multistep characteristic-polynomial
// analysis for the three schemes used by the physics loss.

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "pcsr/grid.hpp"
#include "pcsr/physics.hpp"

namespace pcsr {

enum class SchemeKind { BDF2, CN, EE };

std::string_view to_string(SchemeKind s);
SchemeKind scheme_from_string(std::string_view s);

/// Linear multistep coefficients in the normalisation
///   U_{n+s} + sum_{k<s} alpha_k U_{n+k} + tau sum_k beta_k F_{n+k} = 0,
/// so alphas.back() == 1. The explicit Euler row uses beta_0 = 1 (F at the
/// old state).
struct SchemeSpec {
  SchemeKind scheme = SchemeKind::BDF2;
  std::size_t steps = 2;
  std::vector<double> alphas;  // alpha_0 .. alpha_s
  std::vector<double> betas;   // beta_0 .. beta_s

  /// Throws ArgumentError on wrong coefficient counts or sum(alpha) != 0.
  void validate() const;
  /// sigma(1): the time-derivative normalisation of the residual.
  double beta_sum() const noexcept;
};

SchemeSpec scheme_spec(SchemeKind kind);

/// Residual of a scheme for the unknown frame u_n given previous frames.
/// history[0] is frame n-1, history[1] frame n-2. The residual is scaled to
/// approximate du/dt + f(u):
///   (sum_k alpha_k U_{n-s+k}) / (tau sigma(1)) + (sum_k beta_k F_{n-s+k}) / sigma(1).
/// Throws HistoryError when history is shorter than scheme.steps, ShapeError
/// on grid mismatch, ArgumentError for tau <= 0.
Field2D scheme_residual(const SchemeSpec& scheme, const Field2D& u_n,
                        std::span<const Field2D> history, double tau, const SpatialOperator& op);

/// (3/(2 tau)) (u_n - 4/3 u_{n-1} + 1/3 u_{n-2}) + f(u_n).
Field2D residual_bdf2(const Field2D& u_sr_n, const Field2D& u_gt_nm1, const Field2D& u_gt_nm2,
                      double tau, const ProblemSpec& problem, DerivativeMode mode);
/// (u_n - u_{n-1}) / tau + (f(u_n) + f(u_{n-1})) / 2.
Field2D residual_cn(const Field2D& u_sr_n, const Field2D& u_gt_nm1, double tau,
                    const ProblemSpec& problem, DerivativeMode mode);
/// (u_n - u_{n-1}) / tau + f(u_{n-1}).
Field2D residual_ee(const Field2D& u_sr_n, const Field2D& u_gt_nm1, double tau,
                    const ProblemSpec& problem, DerivativeMode mode);

/// (sum_i |r_i|^p)^(1/p) over all pixels; p = infinity gives the max norm.
double training_error(const Field2D& residual, double p = 2.0);

struct StiffnessPair {
  double D = 0.0;
  double Dc = 0.0;
};

/// rho(z) = sum_k alpha_k z^k and sigma(z) = sum_k beta_k z^k.
std::complex<double> rho(const SchemeSpec& scheme, std::complex<double> z);
std::complex<double> sigma(const SchemeSpec& scheme, std::complex<double> z);

/// pi(z) = rho(z) + tau (D + Dc) sigma(z).
std::complex<double> char_poly(const SchemeSpec& scheme, double tau, const StiffnessPair& stiff,
                               std::complex<double> z);

/// |rho(e^tau) + tau delta sigma(e^tau)| for one step size.
double consistency_defect(const SchemeSpec& scheme, double delta, double tau);

struct OrderFit {
  std::vector<double> taus;
  std::vector<double> defects;
  double slope = 0.0;
};

/// Least-squares slope of log|rho(e^tau) + tau delta sigma(e^tau)| against
/// log tau over tau in {1e-1, 1e-2, 1e-3, 1e-4}.
OrderFit consistency_fit(const SchemeSpec& scheme, double delta);
double consistency_order(const SchemeSpec& scheme, double delta);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace pcsr
