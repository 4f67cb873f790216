#include "pcsr/integrators.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "pcsr/errors.hpp"

namespace pcsr {

std::string_view to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::BDF2: return "bdf2";
    case SchemeKind::CN: return "cn";
    case SchemeKind::EE: return "ee";
  }
  return "unknown";
}

SchemeKind scheme_from_string(std::string_view s) {
  if (s == "bdf2" || s == "bdf" || s == "BDF2" || s == "BDF") return SchemeKind::BDF2;
  if (s == "cn" || s == "CN") return SchemeKind::CN;
  if (s == "ee" || s == "EE") return SchemeKind::EE;
  throw ArgumentError("unknown scheme '" + std::string(s) + "'");
}

void SchemeSpec::validate() const {
  if (steps == 0 || alphas.size() != steps + 1 || betas.size() != steps + 1) {
    throw ArgumentError("scheme coefficients do not match the step count");
  }
  if (alphas.back() != 1.0) throw ArgumentError("leading alpha must be 1");
  const double sum = std::accumulate(alphas.begin(), alphas.end(), 0.0);
  if (std::abs(sum) > 1e-14) throw ArgumentError("scheme violates sum(alpha) = 0");
  if (beta_sum() == 0.0) throw ArgumentError("scheme has sigma(1) = 0");
}

double SchemeSpec::beta_sum() const noexcept {
  return std::accumulate(betas.begin(), betas.end(), 0.0);
}

SchemeSpec scheme_spec(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::BDF2: return {kind, 2, {1.0 / 3.0, -4.0 / 3.0, 1.0}, {0.0, 0.0, 2.0 / 3.0}};
    case SchemeKind::CN: return {kind, 1, {-1.0, 1.0}, {0.5, 0.5}};
    case SchemeKind::EE: return {kind, 1, {-1.0, 1.0}, {1.0, 0.0}};
  }
  throw ArgumentError("unknown scheme");
}

Field2D scheme_residual(const SchemeSpec& scheme, const Field2D& u_n,
                        std::span<const Field2D> history, double tau, const SpatialOperator& op) {
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
  const std::size_t s = scheme.steps;
  if (history.size() < s) {
    throw HistoryError(std::string(to_string(scheme.scheme)) + " needs " + std::to_string(s) +
                       " previous frames, got " + std::to_string(history.size()));
  }
  for (std::size_t k = 0; k < s; ++k) require_same_shape(u_n, history[k], "scheme_residual");

  // frame(k) is U_{n-s+k}: k == s is the unknown, k < s walks back through history.
  auto frame = [&](std::size_t k) -> const Field2D& { return k == s ? u_n : history[s - 1 - k]; };

  const double sig1 = scheme.beta_sum();
  const double time_scale = 1.0 / (tau * sig1);
  Field2D out(u_n.grid());
  for (std::size_t k = 0; k <= s; ++k) {
    const double a = scheme.alphas[k] * time_scale;
    if (a == 0.0) continue;
    const Field2D& u = frame(k);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += a * u[p];
  }
  for (std::size_t k = 0; k <= s; ++k) {
    const double b = scheme.betas[k] / sig1;
    if (b == 0.0) continue;
    const Field2D fk = op.apply(frame(k));
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += b * fk[p];
  }
  return out;
}

Field2D residual_bdf2(const Field2D& u_sr_n, const Field2D& u_gt_nm1, const Field2D& u_gt_nm2,
                      double tau, const ProblemSpec& problem, DerivativeMode mode) {
  const std::array<Field2D, 2> hist{u_gt_nm1, u_gt_nm2};
  return scheme_residual(scheme_spec(SchemeKind::BDF2), u_sr_n, hist, tau,
                         SpatialOperator(problem, u_sr_n.grid(), mode));
}

Field2D residual_cn(const Field2D& u_sr_n, const Field2D& u_gt_nm1, double tau,
                    const ProblemSpec& problem, DerivativeMode mode) {
  return scheme_residual(scheme_spec(SchemeKind::CN), u_sr_n, std::span(&u_gt_nm1, 1), tau,
                         SpatialOperator(problem, u_sr_n.grid(), mode));
}

Field2D residual_ee(const Field2D& u_sr_n, const Field2D& u_gt_nm1, double tau,
                    const ProblemSpec& problem, DerivativeMode mode) {
  return scheme_residual(scheme_spec(SchemeKind::EE), u_sr_n, std::span(&u_gt_nm1, 1), tau,
                         SpatialOperator(problem, u_sr_n.grid(), mode));
}

double training_error(const Field2D& residual, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : residual.values()) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw ArgumentError("training_error: p must be >= 1");
  double acc = 0.0;
  for (double v : residual.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc, 1.0 / p);
}

std::complex<double> rho(const SchemeSpec& scheme, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = scheme.alphas.size(); k-- > 0;) acc = acc * z + scheme.alphas[k];
  return acc;
}

std::complex<double> sigma(const SchemeSpec& scheme, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = scheme.betas.size(); k-- > 0;) acc = acc * z + scheme.betas[k];
  return acc;
}

std::complex<double> char_poly(const SchemeSpec& scheme, double tau, const StiffnessPair& stiff,
                               std::complex<double> z) {
  const double c = tau * (stiff.D + stiff.Dc);
  std::complex<double> acc = 0.0;
  for (std::size_t k = scheme.alphas.size(); k-- > 0;) {
    acc = acc * z + (scheme.alphas[k] + c * scheme.betas[k]);
  }
  return acc;
}

double consistency_defect(const SchemeSpec& scheme, double delta, double tau) {
  // sum(alpha) = 0, so rho(e^tau) = sum alpha_k (e^{k tau} - 1); expm1 keeps
  // the cancellation exact enough down to tau = 1e-4.
  double r = 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < scheme.alphas.size(); ++k) {
    const double em1 = std::expm1(static_cast<double>(k) * tau);
    r += scheme.alphas[k] * em1;
    s += scheme.betas[k] * (1.0 + em1);
  }
  return std::abs(r + tau * delta * s);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need >= 2 points");
  double mx = 0.0;
  double my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw DomainError("loglog_slope: nonpositive value");
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

OrderFit consistency_fit(const SchemeSpec& scheme, double delta) {
  scheme.validate();
  OrderFit fit;
  fit.taus = {1e-1, 1e-2, 1e-3, 1e-4};
  for (double tau : fit.taus) fit.defects.push_back(consistency_defect(scheme, delta, tau));
  fit.slope = loglog_slope(fit.taus, fit.defects);
  return fit;
}

double consistency_order(const SchemeSpec& scheme, double delta) {
  return consistency_fit(scheme, delta).slope;
}

}  // namespace pcsr
