#pragma once

#include "sigmafilt/image.hpp"
#include "sigmafilt/kernel.hpp"

namespace sigmafilt {

/// True convolution (the kernel is reflected through its center before the
/// sliding dot product). Accumulation order is row-major over kernel taps,
/// so parallel and serial runs are bit-identical.
ImagePlane conv2d(const ImagePlane& image, const KernelGrid& kernel, BoundaryMode mode);

/// Two-pass separable convolution (y pass then x pass); equals conv2d with
/// the outer-product kernel.
ImagePlane separable_conv(const ImagePlane& image, const Kernel1D& ky, const Kernel1D& kx,
                          BoundaryMode mode);

/// I * g_cov * f as two convolution steps; by associativity it equals one
/// convolution with compose_kernels(g_cov, f) away from the boundary.
ImagePlane compose_and_filter(const ImagePlane& image, const CovMatrix& cov,
                              const KernelGrid& f, BoundaryMode mode);

/// Convolution with the filter taps spread out by an integer rate;
/// rate 1 reduces to conv2d.
ImagePlane dilated_conv(const ImagePlane& image, const KernelGrid& f, int rate,
                        BoundaryMode mode);

/// Anti-aliased dilation: spherical Gaussian smoothing with
/// sigma = blur_coef * rate, then dilated_conv. The default coefficient of
/// 0.5 places the blur cutoff at half the sampling stride.
ImagePlane blurred_dilated_conv(const ImagePlane& image, const KernelGrid& f, int rate,
                                double blur_coef, BoundaryMode mode);

inline constexpr double kDefaultBlurCoef = 0.5;

/// Blur-and-resample composition: Gaussian blur by cov, then each tap of
/// the square free-form filter f at integer offset o reads the blurred
/// image at p + A o (bilinear), with A the lower Cholesky factor of cov.
/// The covariance shapes f's footprint without extra smoothing.
ImagePlane blur_resample_conv(const ImagePlane& image, const CovMatrix& cov,
                              const KernelGrid& f, BoundaryMode mode);

} // namespace sigmafilt
