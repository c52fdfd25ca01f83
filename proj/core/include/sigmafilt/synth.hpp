#pragma once

#include <cstdint>

#include "sigmafilt/image.hpp"

namespace sigmafilt {

/// Band-limited random texture: seeded uniform noise smoothed by a fixed
/// sigma = 1 Gaussian, then rescaled to span [0, 1]. The smoothing makes
/// blur size identifiable for recovery experiments; pure noise or constant
/// images would be ill-posed targets. Bit-reproducible for a given seed.
ImagePlane synth_texture(int height, int width, std::uint64_t seed);

/// Checkerboard of 0/1 cells. `period` is the full light+dark period in
/// pixels (even, >= 2); period 2 alternates every pixel.
ImagePlane synth_checkerboard(int height, int width, int period = 2);

/// Centered Gaussian bump, peak value 1 at the center pixel, width
/// sigma = min(height, width) / 5.
ImagePlane synth_bump(int height, int width);

} // namespace sigmafilt
