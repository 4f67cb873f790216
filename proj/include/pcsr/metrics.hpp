#pragma once

// Image-quality and gradient-fidelity metrics for SR output against ground truth.

#include "pcsr/grid.hpp"
#include "pcsr/stencils.hpp"

namespace pcsr {

/// Span of possible solution values; 2 for both problems.
struct DynamicRange {
  double max_i = 2.0;
  void validate() const;
};

/// psnr_db and gsnr_db are +infinity when the corresponding error is zero.
struct MetricReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double msge = 0.0;
  double gsnr_db = 0.0;
};

double mse(const Field2D& a, const Field2D& b);
/// 10 log10(range^2 / mse).
double psnr(const Field2D& a, const Field2D& b, double range = 2.0);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// over all fully contained window positions. Grids smaller than 11 in either
/// direction use a single uniform window covering the whole field.
double ssim(const Field2D& a, const Field2D& b, double range = 2.0);

/// Mean over interior pixels of |grad u_gt - grad u_sr|^2.
double msge(const Field2D& u_gt, const Field2D& u_sr,
            DerivativeMode mode = DerivativeMode::StandardFD,
            BoundaryKind bc = BoundaryKind::Neumann);

/// 10 log10(MAXG / msge) with MAXG = (max_i / h)^2. Throws ArgumentError for
/// anisotropic grids.
double gsnr(const Field2D& u_gt, const Field2D& u_sr, const DynamicRange& range, double h,
            DerivativeMode mode = DerivativeMode::StandardFD,
            BoundaryKind bc = BoundaryKind::Neumann);

MetricReport evaluate_metrics(const Field2D& u_gt, const Field2D& u_sr, const DynamicRange& range,
                              DerivativeMode mode = DerivativeMode::StandardFD,
                              BoundaryKind bc = BoundaryKind::Neumann);

}  // namespace pcsr
