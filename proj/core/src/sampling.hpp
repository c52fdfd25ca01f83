#pragma once

#include <cmath>

#include "sigmafilt/image.hpp"

namespace sigmafilt::detail {

// Bilinear interpolation with zero-valued phantom pixels outside the image.
// Callers guarantee finite, non-NaN coordinates.
inline double bilinear_zero(const ImagePlane& image, double y, double x) {
    const int h = image.height();
    const int w = image.width();
    if (y <= -1.0 || y >= h || x <= -1.0 || x >= w) {
        return 0.0;
    }
    const double fy = std::floor(y);
    const double fx = std::floor(x);
    const int y0 = static_cast<int>(fy);
    const int x0 = static_cast<int>(fx);
    const double ty = y - fy;
    const double tx = x - fx;

    auto pixel = [&](int yy, int xx) {
        return (yy >= 0 && yy < h && xx >= 0 && xx < w) ? image.at(yy, xx) : 0.0;
    };
    const double v00 = pixel(y0, x0);
    const double v01 = pixel(y0, x0 + 1);
    const double v10 = pixel(y0 + 1, x0);
    const double v11 = pixel(y0 + 1, x0 + 1);
    return (1.0 - ty) * ((1.0 - tx) * v00 + tx * v01) + ty * ((1.0 - tx) * v10 + tx * v11);
}

// d bilinear_zero / d(y, x); piecewise constant inside each unit cell.
inline void bilinear_zero_grad(const ImagePlane& image, double y, double x, double& gy,
                               double& gx) {
    const int h = image.height();
    const int w = image.width();
    if (y <= -1.0 || y >= h || x <= -1.0 || x >= w) {
        gy = 0.0;
        gx = 0.0;
        return;
    }
    const double fy = std::floor(y);
    const double fx = std::floor(x);
    const int y0 = static_cast<int>(fy);
    const int x0 = static_cast<int>(fx);
    const double ty = y - fy;
    const double tx = x - fx;

    auto pixel = [&](int yy, int xx) {
        return (yy >= 0 && yy < h && xx >= 0 && xx < w) ? image.at(yy, xx) : 0.0;
    };
    const double v00 = pixel(y0, x0);
    const double v01 = pixel(y0, x0 + 1);
    const double v10 = pixel(y0 + 1, x0);
    const double v11 = pixel(y0 + 1, x0 + 1);
    gy = (1.0 - tx) * (v10 - v00) + tx * (v11 - v01);
    gx = (1.0 - ty) * (v01 - v00) + ty * (v11 - v10);
}

} // namespace sigmafilt::detail
