#include "sigmafilt/filtering.hpp"

#include <cmath>

#include "parallel.hpp"
#include "sampling.hpp"

namespace sigmafilt {

namespace {

// reflect-101 fold of an integer index into [0, n)
int reflect_index(int i, int n) {
    if (n == 1) {
        return 0;
    }
    const int period = 2 * (n - 1);
    int m = i % period;
    if (m < 0) {
        m += period;
    }
    return m < n ? m : period - m;
}

// reflect-101 fold of a continuous coordinate into [0, n - 1]
double reflect_coord(double t, int n) {
    if (n == 1) {
        return 0.0;
    }
    const double period = 2.0 * (n - 1);
    double m = std::fmod(t, period);
    if (m < 0.0) {
        m += period;
    }
    return m <= n - 1 ? m : period - m;
}

void check_valid_fits(const ImagePlane& image, int reach_y, int reach_x) {
    if (image.height() <= 2 * reach_y || image.width() <= 2 * reach_x) {
        throw ShapeError("valid mode: image " + std::to_string(image.height()) + "x" +
                         std::to_string(image.width()) + " is too small for a filter reach of " +
                         std::to_string(reach_y) + "," + std::to_string(reach_x));
    }
}

// Shared core of conv2d and dilated_conv: taps at offsets scaled by `rate`.
ImagePlane conv2d_rated(const ImagePlane& image, const KernelGrid& kernel, int rate,
                        BoundaryMode mode) {
    const int h = image.height();
    const int w = image.width();
    const int ry = kernel.ry();
    const int rx = kernel.rx();
    const int reach_y = rate * ry;
    const int reach_x = rate * rx;

    const bool valid = mode == BoundaryMode::valid;
    if (valid) {
        check_valid_fits(image, reach_y, reach_x);
    }
    const int out_h = valid ? h - 2 * reach_y : h;
    const int out_w = valid ? w - 2 * reach_x : w;
    // valid output (y, x) is centered on input (y + reach_y, x + reach_x)
    const int cy = valid ? reach_y : 0;
    const int cx = valid ? reach_x : 0;

    ImagePlane out(out_h, out_w);
    const std::size_t work = static_cast<std::size_t>(out_w) *
                             static_cast<std::size_t>(kernel.height()) *
                             static_cast<std::size_t>(kernel.width());
    detail::parallel_for(out_h, work, [&](int y) {
        for (int x = 0; x < out_w; ++x) {
            const int iy = y + cy;
            const int ix = x + cx;
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int sy = iy - rate * dy;
                    const int sx = ix - rate * dx;
                    double v;
                    if (sy >= 0 && sy < h && sx >= 0 && sx < w) {
                        v = image.at(sy, sx);
                    } else if (mode == BoundaryMode::reflect_same) {
                        v = image.at(reflect_index(sy, h), reflect_index(sx, w));
                    } else {
                        continue; // zero padding (valid never lands here)
                    }
                    acc += kernel.at(dy, dx) * v;
                }
            }
            out.at(y, x) = acc;
        }
    });
    return out;
}

enum class Axis { y, x };

ImagePlane conv1d(const ImagePlane& image, const Kernel1D& kernel, Axis axis, BoundaryMode mode) {
    const int h = image.height();
    const int w = image.width();
    const int r = kernel.r;
    const bool along_y = axis == Axis::y;

    const bool valid = mode == BoundaryMode::valid;
    if (valid) {
        check_valid_fits(image, along_y ? r : 0, along_y ? 0 : r);
    }
    const int out_h = valid && along_y ? h - 2 * r : h;
    const int out_w = valid && !along_y ? w - 2 * r : w;
    const int cy = valid && along_y ? r : 0;
    const int cx = valid && !along_y ? r : 0;

    ImagePlane out(out_h, out_w);
    const std::size_t work = static_cast<std::size_t>(out_w) * kernel.taps.size();
    detail::parallel_for(out_h, work, [&](int y) {
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int d = -r; d <= r; ++d) {
                int sy = y + cy - (along_y ? d : 0);
                int sx = x + cx - (along_y ? 0 : d);
                double v;
                if (sy >= 0 && sy < h && sx >= 0 && sx < w) {
                    v = image.at(sy, sx);
                } else if (mode == BoundaryMode::reflect_same) {
                    v = image.at(reflect_index(sy, h), reflect_index(sx, w));
                } else {
                    continue;
                }
                acc += kernel.taps[static_cast<std::size_t>(d + r)] * v;
            }
            out.at(y, x) = acc;
        }
    });
    return out;
}

} // namespace

ImagePlane conv2d(const ImagePlane& image, const KernelGrid& kernel, BoundaryMode mode) {
    return conv2d_rated(image, kernel, 1, mode);
}

ImagePlane separable_conv(const ImagePlane& image, const Kernel1D& ky, const Kernel1D& kx,
                          BoundaryMode mode) {
    return conv1d(conv1d(image, ky, Axis::y, mode), kx, Axis::x, mode);
}

ImagePlane compose_and_filter(const ImagePlane& image, const CovMatrix& cov,
                              const KernelGrid& f, BoundaryMode mode) {
    return conv2d(conv2d(image, gaussian_kernel(cov), mode), f, mode);
}

ImagePlane dilated_conv(const ImagePlane& image, const KernelGrid& f, int rate,
                        BoundaryMode mode) {
    if (rate < 1) {
        throw DomainError("dilated_conv: rate must be >= 1, got " + std::to_string(rate));
    }
    return conv2d_rated(image, f, rate, mode);
}

ImagePlane blurred_dilated_conv(const ImagePlane& image, const KernelGrid& f, int rate,
                                double blur_coef, BoundaryMode mode) {
    if (rate < 1) {
        throw DomainError("blurred_dilated_conv: rate must be >= 1, got " + std::to_string(rate));
    }
    if (!(blur_coef > 0.0) || !std::isfinite(blur_coef)) {
        throw DomainError("blurred_dilated_conv: blur_coef must be positive");
    }
    const double sigma = blur_coef * rate;
    const CovMatrix cov{sigma * sigma, sigma * sigma, 0.0};
    const SeparablePair sep = separable_1d(cov);
    return dilated_conv(separable_conv(image, sep.ky, sep.kx, mode), f, rate, mode);
}

ImagePlane blur_resample_conv(const ImagePlane& image, const CovMatrix& cov,
                              const KernelGrid& f, BoundaryMode mode) {
    if (f.ry() != f.rx()) {
        throw ShapeError("blur_resample_conv: free-form filter must be square");
    }
    const ImagePlane blurred = conv2d(image, gaussian_kernel(cov), mode);
    const Mat2 a = cholesky_factor(cov);

    const int h = blurred.height();
    const int w = blurred.width();
    const int r = f.ry();
    ImagePlane out(h, w);
    const std::size_t work = static_cast<std::size_t>(w) *
                             static_cast<std::size_t>(f.height()) *
                             static_cast<std::size_t>(f.width());
    detail::parallel_for(h, work, [&](int y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    const Vec2 o = a.apply({static_cast<double>(dy), static_cast<double>(dx)});
                    double sy = y + o.y;
                    double sx = x + o.x;
                    if (mode == BoundaryMode::reflect_same) {
                        sy = reflect_coord(sy, h);
                        sx = reflect_coord(sx, w);
                    }
                    acc += f.at(dy, dx) * detail::bilinear_zero(blurred, sy, sx);
                }
            }
            out.at(y, x) = acc;
        }
    });
    return out;
}

} // namespace sigmafilt
