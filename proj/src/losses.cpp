#include "pcsr/losses.hpp"

#include <cmath>

#include "pcsr/errors.hpp"

namespace pcsr {

LossWeights LossWeights::defaults_for(ProblemKind problem) {
  LossWeights w;
  if (problem == ProblemKind::ErikssonJohnson) {
    w.w4 = 1e-2;
    w.w5 = 100.0;
  }
  return w;
}

void LossWeights::validate() const {
  for (double w : {w1, w4, w5}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("loss weights must be finite and >= 0");
  }
}

double pixel_loss(const Field2D& u_sr, const Field2D& u_gt) {
  require_same_shape(u_sr, u_gt, "pixel_loss");
  double acc = 0.0;
  for (std::size_t p = 0; p < u_sr.size(); ++p) {
    const double d = u_sr[p] - u_gt[p];
    acc += d * d;
  }
  return acc / static_cast<double>(u_sr.size());
}

Field2D physics_residual(const Field2D& u_sr_n, std::span<const Field2D> history, double tau,
                         const ProblemSpec& problem, const SchemeSpec& scheme, DerivativeMode mode) {
  return scheme_residual(scheme, u_sr_n, history, tau, SpatialOperator(problem, u_sr_n.grid(), mode));
}

double physics_inner_loss(const Field2D& u_sr_n, std::span<const Field2D> history, double tau,
                          const ProblemSpec& problem, const SchemeSpec& scheme, DerivativeMode mode) {
  const Field2D r = physics_residual(u_sr_n, history, tau, problem, scheme, mode);
  const GridSpec& g = r.grid();
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < g.ny; ++i) {
    for (std::size_t j = 1; j + 1 < g.nx; ++j) acc += r(i, j) * r(i, j);
  }
  return acc / static_cast<double>(interior_count(g));
}

namespace {

double vec_mse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return acc / static_cast<double>(a.size());
}

}  // namespace

double physics_boundary_loss(const Field2D& u_sr, const Field2D* u_gt, BoundaryKind bc) {
  constexpr Side kSides[] = {Side::Left, Side::Right, Side::Top, Side::Bottom};
  switch (bc) {
    case BoundaryKind::Dirichlet: {
      if (u_gt == nullptr) throw ArgumentError("Dirichlet boundary loss needs a reference field");
      require_same_shape(u_sr, *u_gt, "physics_boundary_loss");
      double acc = 0.0;
      for (Side s : kSides) acc += vec_mse(extract_boundary(u_sr, s, 0), extract_boundary(*u_gt, s, 0));
      return acc;
    }
    case BoundaryKind::Periodic:
      return vec_mse(extract_boundary(u_sr, Side::Left, 0), extract_boundary(u_sr, Side::Right, 0)) +
             vec_mse(extract_boundary(u_sr, Side::Top, 0), extract_boundary(u_sr, Side::Bottom, 0));
    case BoundaryKind::Neumann: {
      double acc = 0.0;
      for (Side s : kSides) acc += vec_mse(extract_boundary(u_sr, s, 0), extract_boundary(u_sr, s, 1));
      return acc;
    }
  }
  throw ArgumentError("unknown boundary kind");
}

LossReport composite_loss(const Field2D& u_sr, const Field2D& u_gt,
                          std::span<const Field2D> history, double tau, const ProblemSpec& problem,
                          const SchemeSpec& scheme, const LossWeights& weights, DerivativeMode mode) {
  weights.validate();
  LossReport rep;
  rep.weights = weights;
  rep.pixel = pixel_loss(u_sr, u_gt);
  rep.inner = physics_inner_loss(u_sr, history, tau, problem, scheme, mode);
  rep.boundary = physics_boundary_loss(u_sr, &u_gt, problem.boundary);
  rep.composite = weights.w1 * rep.pixel + weights.w4 * rep.inner + weights.w5 * rep.boundary;
  return rep;
}

}  // namespace pcsr
