#include "pcsr/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "pcsr/errors.hpp"

namespace pcsr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kWin = 11;

std::array<double, kWin> gaussian_1d() {
  std::array<double, kWin> w{};
  double sum = 0.0;
  for (int k = 0; k < kWin; ++k) {
    const double d = k - kWin / 2;
    w[k] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

double ssim_from_moments(double mu_a, double mu_b, double var_a, double var_b, double cov,
                         double c1, double c2) {
  return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

// In a Dirichlet problem the field carries its own boundary ring, so the
// derivative stencils pad with the field itself.
const Field2D* self_pad(const Field2D& f, BoundaryKind bc) {
  return bc == BoundaryKind::Dirichlet ? &f : nullptr;
}

}  // namespace

void DynamicRange::validate() const {
  if (!(max_i > 0.0) || !std::isfinite(max_i)) throw ArgumentError("dynamic range must be positive");
}

double mse(const Field2D& a, const Field2D& b) {
  require_same_shape(a, b, "mse");
  double acc = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) acc += (a[p] - b[p]) * (a[p] - b[p]);
  return acc / static_cast<double>(a.size());
}

double psnr(const Field2D& a, const Field2D& b, double range) {
  if (!(range > 0.0)) throw ArgumentError("psnr: range must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return kInf;
  return 10.0 * std::log10(range * range / m);
}

double ssim(const Field2D& a, const Field2D& b, double range) {
  require_same_shape(a, b, "ssim");
  if (!(range > 0.0)) throw ArgumentError("ssim: range must be positive");
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const std::size_t nx = a.nx();
  const std::size_t ny = a.ny();

  if (nx < kWin || ny < kWin) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      ma += a[p];
      mb += b[p];
    }
    ma /= n;
    mb /= n;
    double va = 0, vb = 0, cv = 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      va += (a[p] - ma) * (a[p] - ma);
      vb += (b[p] - mb) * (b[p] - mb);
      cv += (a[p] - ma) * (b[p] - mb);
    }
    return ssim_from_moments(ma, mb, va / n, vb / n, cv / n, c1, c2);
  }

  const auto w = gaussian_1d();
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i0 = 0; i0 + kWin <= ny; ++i0) {
    for (std::size_t j0 = 0; j0 + kWin <= nx; ++j0) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int di = 0; di < kWin; ++di) {
        for (int dj = 0; dj < kWin; ++dj) {
          const double wt = w[di] * w[dj];
          const double x = a(i0 + di, j0 + dj);
          const double y = b(i0 + di, j0 + dj);
          ma += wt * x;
          mb += wt * y;
          saa += wt * x * x;
          sbb += wt * y * y;
          sab += wt * x * y;
        }
      }
      total += ssim_from_moments(ma, mb, saa - ma * ma, sbb - mb * mb, sab - ma * mb, c1, c2);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double msge(const Field2D& u_gt, const Field2D& u_sr, DerivativeMode mode, BoundaryKind bc) {
  require_same_shape(u_gt, u_sr, "msge");
  const Field2D diff = u_gt - u_sr;
  const Field2D gx = ddx(diff, mode, bc, self_pad(diff, bc));
  const Field2D gy = ddy(diff, mode, bc, self_pad(diff, bc));
  const GridSpec& g = diff.grid();
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < g.ny; ++i) {
    for (std::size_t j = 1; j + 1 < g.nx; ++j) acc += gx(i, j) * gx(i, j) + gy(i, j) * gy(i, j);
  }
  return acc / static_cast<double>(interior_count(g));
}

double gsnr(const Field2D& u_gt, const Field2D& u_sr, const DynamicRange& range, double h,
            DerivativeMode mode, BoundaryKind bc) {
  range.validate();
  if (!(h > 0.0)) throw ArgumentError("gsnr: h must be positive");
  if (!u_gt.grid().isotropic()) throw ArgumentError("gsnr requires an isotropic grid");
  const double m = msge(u_gt, u_sr, mode, bc);
  if (m == 0.0) return kInf;
  const double maxg = (range.max_i / h) * (range.max_i / h);
  return 10.0 * std::log10(maxg) - 10.0 * std::log10(m);
}

MetricReport evaluate_metrics(const Field2D& u_gt, const Field2D& u_sr, const DynamicRange& range,
                              DerivativeMode mode, BoundaryKind bc) {
  range.validate();
  MetricReport r;
  r.mse = mse(u_gt, u_sr);
  r.psnr_db = psnr(u_gt, u_sr, range.max_i);
  r.ssim = ssim(u_gt, u_sr, range.max_i);
  r.msge = msge(u_gt, u_sr, mode, bc);
  r.gsnr_db = gsnr(u_gt, u_sr, range, u_gt.grid().hx, mode, bc);
  return r;
}

}  // namespace pcsr
