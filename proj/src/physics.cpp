#include "pcsr/physics.hpp"

#include <cmath>
#include <numbers>

#include "pcsr/errors.hpp"

namespace pcsr {
namespace {

constexpr double kAllenCahnLinear = 1.2;

void check_open_unit_interval(const Field2D& u) {
  for (double v : u.values()) {
    if (!(std::abs(v) < 1.0)) {
      throw DomainError("Allen-Cahn operator needs |u| < 1 (log singularity), got " +
                        std::to_string(v));
    }
  }
}

// Like ProblemSpec::validate but admits eps == 0 (pure transport/reaction).
void check_operator_params(const ProblemSpec& p) {
  ProblemSpec q = p;
  if (q.epsilon == 0.0) q.epsilon = 1.0;
  if (q.epsilon < 0.0) throw ArgumentError("epsilon must be nonnegative");
  q.validate();
}

}  // namespace

double interface_constant(InterfaceVariant variant) {
  const double h = 1.0 / 64.0;
  const double denom_fn = variant == InterfaceVariant::Appendix ? std::atanh(0.9) : std::tanh(0.9);
  return h / (2.0 * std::numbers::sqrt2 * denom_fn);
}

double helmholtz_dphi(double phi, double T, double Tc) {
  if (!(std::abs(phi) < 1.0)) throw DomainError("helmholtz_dphi needs |phi| < 1");
  if (!(T > 0.0)) throw DomainError("helmholtz_dphi needs T > 0");
  return std::log((1.0 + phi) / (1.0 - phi)) / (2.0 * T) - Tc * phi;
}

AllenCahnThermo thermo_from_problem(const ProblemSpec& p) {
  const double kt = p.K * p.theta;
  if (!(kt > 0.0)) throw DomainError("Allen-Cahn thermodynamic form needs K*theta > 0");
  const double e = interface_constant(p.interface);
  AllenCahnThermo t;
  t.mobility = p.epsilon;
  t.temperature = p.epsilon / kt;
  t.critical_temperature = kAllenCahnLinear * e * e / p.epsilon;
  t.gradient_coefficient = e;
  return t;
}

double theta_from_temperature(double mobility, double temperature, double K,
                              InterfaceVariant /*variant*/) {
  if (!(temperature > 0.0) || K == 0.0) throw DomainError("theta_from_temperature: bad input");
  return mobility / (temperature * K);
}

double theta_from_reaction_ratio(double ratio, double K, InterfaceVariant variant) {
  if (K == 0.0) throw DomainError("theta_from_reaction_ratio: K must be nonzero");
  const double e = interface_constant(variant);
  return ratio * e * e / K;
}

EJAnalyticParams ej_analytic_params(double eps, double l) {
  using std::numbers::pi;
  if (!(eps > 0.0)) throw DomainError("ej_analytic_params: eps must be positive");
  const double disc = 1.0 - 4.0 * eps * l;
  if (disc < 0.0) throw DomainError("ej_analytic_params: 1 - 4 eps l < 0");
  const double sq = std::sqrt(disc);
  const double sd = std::sqrt(1.0 + 4.0 * pi * pi * eps * eps);
  EJAnalyticParams p;
  p.lambda1 = (-1.0 + sq) / (-2.0 * eps);
  p.lambda2 = (-1.0 - sq) / (-2.0 * eps);
  p.delta1 = (1.0 + sd) / (2.0 * eps);
  p.delta2 = (1.0 - sd) / (2.0 * eps);
  return p;
}

namespace {

double ej_steady_part(double x, double y, const EJAnalyticParams& p) {
  using std::numbers::pi;
  return std::cos(pi * y) * (std::exp(p.delta2 * x) - std::exp(p.delta1 * x)) /
         (std::exp(-p.delta2) - std::exp(-p.delta1));
}

}  // namespace

double ej_boundary_value(double x, double y, double t, const EJAnalyticParams& p) {
  return std::exp(-t) * (std::exp(p.lambda1 * x) - std::exp(p.lambda2 * x)) +
         ej_steady_part(x, y, p);
}

double ej_initial_value(double x, double y, const EJAnalyticParams& p) {
  return (std::exp(p.lambda1 * x) - std::exp(p.lambda2 * x)) + ej_steady_part(x, y, p);
}

Field2D ej_analytic_field(const GridSpec& grid, const ProblemSpec& problem, double t) {
  const EJAnalyticParams p = ej_analytic_params(problem.epsilon, problem.K);
  return field_from_function(grid, [&](double x, double y) { return ej_boundary_value(x, y, t, p); });
}

SpatialOperator::SpatialOperator(const ProblemSpec& problem, const GridSpec& grid,
                                 DerivativeMode mode)
    : problem_(problem), grid_(grid), mode_(mode) {
  check_operator_params(problem_);
  grid_.validate();
  lap_ = laplacian_kernel(mode, grid);
  dx_ = ddx_kernel(mode, grid);
  dy_ = ddy_kernel(mode, grid);
  if (problem_.problem == ProblemKind::AllenCahn) {
    const double e = interface_constant(problem_.interface);
    log_coef_ = 0.5 / (e * e) * problem_.K * problem_.theta;
  }
}

Field2D SpatialOperator::apply_linear(const Field2D& u, const Field2D* pad) const {
  if (!u.grid().same_shape(grid_)) throw ShapeError("SpatialOperator: grid mismatch");
  const BoundaryKind bc = problem_.boundary;
  const Field2D* p = (bc == BoundaryKind::Dirichlet && pad == nullptr) ? &u : pad;
  Field2D out = apply_kernel(u, lap_, bc, p);
  out *= -problem_.epsilon;
  if (problem_.problem == ProblemKind::ErikssonJohnson) {
    const double cx = problem_.r * std::cos(problem_.theta);
    const double cy = problem_.r * std::sin(problem_.theta);
    const Field2D gx = apply_kernel(u, dx_, bc, p);
    const Field2D gy = apply_kernel(u, dy_, bc, p);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += cx * gx[k] + cy * gy[k];
  }
  return out;
}

Field2D SpatialOperator::apply(const Field2D& u, const Field2D* pad) const {
  if (problem_.problem == ProblemKind::AllenCahn) check_open_unit_interval(u);
  Field2D out = apply_linear(u, pad);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += reaction(u[k]);
  return out;
}

Field2D SpatialOperator::linear_adjoint(const Field2D& w) const {
  const BoundaryKind bc = problem_.boundary;
  Field2D out = apply_kernel_adjoint(w, lap_, bc);
  out *= -problem_.epsilon;
  if (problem_.problem == ProblemKind::ErikssonJohnson) {
    const double cx = problem_.r * std::cos(problem_.theta);
    const double cy = problem_.r * std::sin(problem_.theta);
    const Field2D gx = apply_kernel_adjoint(w, dx_, bc);
    const Field2D gy = apply_kernel_adjoint(w, dy_, bc);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += cx * gx[k] + cy * gy[k];
  }
  return out;
}

void SpatialOperator::append_linear_entries(double coef, std::vector<StencilEntry>& out) const {
  const BoundaryKind bc = problem_.boundary;
  append_kernel_entries(grid_, lap_, bc, -problem_.epsilon * coef, out);
  if (problem_.problem == ProblemKind::ErikssonJohnson) {
    append_kernel_entries(grid_, dx_, bc, coef * problem_.r * std::cos(problem_.theta), out);
    append_kernel_entries(grid_, dy_, bc, coef * problem_.r * std::sin(problem_.theta), out);
  }
}

double SpatialOperator::reaction(double u) const {
  if (problem_.problem == ProblemKind::AllenCahn) {
    return log_coef_ * std::log((1.0 + u) / (1.0 - u)) - kAllenCahnLinear * u;
  }
  return problem_.K * u * (u - 1.0);
}

double SpatialOperator::reaction_derivative(double u) const {
  if (problem_.problem == ProblemKind::AllenCahn) {
    return 2.0 * log_coef_ / (1.0 - u * u) - kAllenCahnLinear;
  }
  return problem_.K * (2.0 * u - 1.0);
}

Field2D f_allen_cahn(const Field2D& u, double eps, double K, double theta, DerivativeMode mode,
                     BoundaryKind bc, InterfaceVariant variant) {
  ProblemSpec p;
  p.problem = ProblemKind::AllenCahn;
  p.epsilon = eps;
  p.K = K;
  p.theta = theta;
  p.boundary = bc;
  p.interface = variant;
  return SpatialOperator(p, u.grid(), mode).apply(u);
}

Field2D f_eriksson_johnson(const Field2D& u, double eps, double K, double r, double theta,
                           DerivativeMode mode, BoundaryKind bc, const Field2D* dirichlet_pad) {
  if (bc != BoundaryKind::Dirichlet) {
    throw ArgumentError("Eriksson-Johnson operator requires Dirichlet boundaries");
  }
  if (dirichlet_pad == nullptr) throw ArgumentError("Eriksson-Johnson operator requires a Dirichlet pad");
  ProblemSpec p;
  p.problem = ProblemKind::ErikssonJohnson;
  p.epsilon = eps;
  p.K = K;
  p.r = r;
  p.theta = theta;
  p.boundary = bc;
  p.domain = default_domain(ProblemKind::ErikssonJohnson);
  return SpatialOperator(p, u.grid(), mode).apply(u, dirichlet_pad);
}

}  // namespace pcsr
