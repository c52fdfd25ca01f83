#pragma once

// Shared helpers for the test suites: deterministic generators, central
// finite differences, and independent oracle implementations that must not
// share code with the library paths they check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "sigmafilt/dynamic.hpp"
#include "sigmafilt/filtering.hpp"
#include "sigmafilt/image.hpp"
#include "sigmafilt/kernel.hpp"

namespace testutil {

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline sigmafilt::ImagePlane random_image(int h, int w, std::uint64_t seed, double lo = 0.0,
                                          double hi = 1.0) {
    sigmafilt::ImagePlane img(h, w);
    std::mt19937_64 rng(seed);
    for (double& v : img.values()) {
        v = lo + (hi - lo) * unit_double(rng);
    }
    return img;
}

inline sigmafilt::CovParams random_params(sigmafilt::CovFamily family, std::mt19937_64& rng,
                                          double lo = -3.0, double hi = 3.0) {
    std::array<double, 3> p{};
    const int n = sigmafilt::param_count(family);
    for (int i = 0; i < n; ++i) {
        p[static_cast<std::size_t>(i)] = lo + (hi - lo) * unit_double(rng);
    }
    return sigmafilt::CovParams(family, std::span<const double>(p.data(), static_cast<std::size_t>(n)));
}

/// Three-point central finite difference.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double analytic, double reference, double floor = 1e-8) {
    return std::abs(analytic - reference) / std::max(std::abs(reference), floor);
}

inline double max_abs_diff(const sigmafilt::ImagePlane& a, const sigmafilt::ImagePlane& b) {
    double m = 0.0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            m = std::max(m, std::abs(a.at(y, x) - b.at(y, x)));
        }
    }
    return m;
}

inline double max_abs_diff_interior(const sigmafilt::ImagePlane& a, const sigmafilt::ImagePlane& b,
                                    int margin) {
    double m = 0.0;
    for (int y = margin; y < a.height() - margin; ++y) {
        for (int x = margin; x < a.width() - margin; ++x) {
            m = std::max(m, std::abs(a.at(y, x) - b.at(y, x)));
        }
    }
    return m;
}

// ----------------------------------------------------------------------------
// Independent oracles. These deliberately re-derive results with plain loops
// and their own interpolation so that they share no code with the library.
// ----------------------------------------------------------------------------

/// Direct evaluation of an unnormalized Gaussian grid followed by
/// normalization, written against the covariance entries themselves.
inline std::vector<double> oracle_gaussian_grid(double syy, double sxx, double sxy, int ry,
                                                int rx) {
    const double det = syy * sxx - sxy * sxy;
    std::vector<double> grid;
    double sum = 0.0;
    for (int dy = -ry; dy <= ry; ++dy) {
        for (int dx = -rx; dx <= rx; ++dx) {
            // x' Sigma^-1 x expanded for the 2x2 inverse
            const double q = (sxx * dy * dy - 2.0 * sxy * dy * dx + syy * dx * dx) / det;
            const double h = std::exp(-0.5 * q);
            grid.push_back(h);
            sum += h;
        }
    }
    for (double& v : grid) {
        v /= sum;
    }
    return grid;
}

/// Separate bilinear routine for oracle use (clamps nothing, zero outside).
inline double oracle_bilinear(const sigmafilt::ImagePlane& img, double y, double x) {
    const auto sample = [&](long yy, long xx) -> double {
        if (yy < 0 || yy >= img.height() || xx < 0 || xx >= img.width()) {
            return 0.0;
        }
        return img.at(static_cast<int>(yy), static_cast<int>(xx));
    };
    if (!(y > -2.0) || !(y < img.height() + 1.0) || !(x > -2.0) || !(x < img.width() + 1.0)) {
        return 0.0;
    }
    const long y0 = static_cast<long>(std::floor(y));
    const long x0 = static_cast<long>(std::floor(x));
    const double ty = y - static_cast<double>(y0);
    const double tx = x - static_cast<double>(x0);
    const double top = (1.0 - tx) * sample(y0, x0) + tx * sample(y0, x0 + 1);
    const double bottom = (1.0 - tx) * sample(y0 + 1, x0) + tx * sample(y0 + 1, x0 + 1);
    return (1.0 - ty) * top + ty * bottom;
}

/// Direct loop over taps for the blur-and-resample composition: blur with a
/// dense sliding dot product, then read each tap at p + A o.
inline sigmafilt::ImagePlane oracle_blur_resample(const sigmafilt::ImagePlane& image,
                                                  const sigmafilt::CovMatrix& cov,
                                                  const sigmafilt::KernelGrid& f) {
    using namespace sigmafilt;
    const KernelGrid g = gaussian_kernel(cov);
    ImagePlane blurred(image.height(), image.width());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double acc = 0.0;
            for (int dy = -g.ry(); dy <= g.ry(); ++dy) {
                for (int dx = -g.rx(); dx <= g.rx(); ++dx) {
                    const int sy = y - dy;
                    const int sx = x - dx;
                    if (sy >= 0 && sy < image.height() && sx >= 0 && sx < image.width()) {
                        acc += g.at(dy, dx) * image.at(sy, sx);
                    }
                }
            }
            blurred.at(y, x) = acc;
        }
    }

    // lower-triangular factor computed inline from the covariance entries
    const double a00 = std::sqrt(cov.syy);
    const double a10 = cov.sxy / a00;
    const double a11 = std::sqrt(cov.sxx - a10 * a10);

    ImagePlane out(image.height(), image.width());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            double acc = 0.0;
            for (int dy = -f.ry(); dy <= f.ry(); ++dy) {
                for (int dx = -f.rx(); dx <= f.rx(); ++dx) {
                    const double oy = a00 * dy;
                    const double ox = a10 * dy + a11 * dx;
                    acc += f.at(dy, dx) * oracle_bilinear(blurred, y + oy, x + ox);
                }
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

/// Direct loop for the dynamic 9-tap sampler with its own ring table and
/// bilinear routine.
inline sigmafilt::ImagePlane oracle_dynamic_conv(const sigmafilt::ImagePlane& image,
                                                 const sigmafilt::CovField& field,
                                                 const sigmafilt::TapWeights& weights) {
    using namespace sigmafilt;
    const double s = std::sqrt(0.5);
    const double ring_y[9] = {0, 0, s, 1, s, 0, -s, -1, -s};
    const double ring_x[9] = {0, 1, s, 0, -s, -1, -s, 0, s};

    ImagePlane out(image.height(), image.width());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const CovMatrix cov = params_to_matrix(field.at(y, x));
            const double a00 = std::sqrt(cov.syy);
            const double a10 = cov.sxy / a00;
            const double a11 = std::sqrt(cov.sxx - a10 * a10);
            double acc = 0.0;
            for (int i = 0; i < 9; ++i) {
                const double oy = a00 * ring_y[i];
                const double ox = a10 * ring_y[i] + a11 * ring_x[i];
                acc += weights.w[static_cast<std::size_t>(i)] *
                       oracle_bilinear(image, y + oy, x + ox);
            }
            out.at(y, x) = acc;
        }
    }
    return out;
}

} // namespace testutil
