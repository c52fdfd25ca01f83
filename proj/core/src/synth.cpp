#include "sigmafilt/synth.hpp"

#include <cmath>
#include <random>

#include "sigmafilt/errors.hpp"
#include "sigmafilt/filtering.hpp"

namespace sigmafilt {

namespace {

// mt19937_64 output mapped to [0, 1) by hand; std::uniform_real_distribution
// is implementation-defined and would break cross-platform reproducibility.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

ImagePlane synth_texture(int height, int width, std::uint64_t seed) {
    ImagePlane noise(height, width);
    std::mt19937_64 rng(seed);
    for (double& v : noise.values()) {
        v = unit_double(rng);
    }
    const CovMatrix unit{1.0, 1.0, 0.0};
    ImagePlane smooth = conv2d(noise, gaussian_kernel(unit), BoundaryMode::reflect_same);

    double lo = smooth.values()[0];
    double hi = lo;
    for (double v : smooth.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi > lo) {
        const double scale = 1.0 / (hi - lo);
        for (double& v : smooth.values()) {
            v = (v - lo) * scale;
        }
    }
    return smooth;
}

ImagePlane synth_checkerboard(int height, int width, int period) {
    if (period < 2 || period % 2 != 0) {
        throw DomainError("checkerboard period must be even and >= 2, got " +
                          std::to_string(period));
    }
    const int cell = period / 2;
    ImagePlane img(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            img.at(y, x) = static_cast<double>(((y / cell) + (x / cell)) % 2);
        }
    }
    return img;
}

ImagePlane synth_bump(int height, int width) {
    const double sigma = std::min(height, width) / 5.0;
    const double cy = (height - 1) / 2.0;
    const double cx = (width - 1) / 2.0;
    ImagePlane img(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dy = y - cy;
            const double dx = x - cx;
            img.at(y, x) = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
        }
    }
    return img;
}

} // namespace sigmafilt
