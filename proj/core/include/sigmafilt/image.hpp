#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace sigmafilt {

/// Single-channel H x W grid of real intensities, row-major.
/// Values are nominally in [0, 1] but not clamped.
class ImagePlane {
public:
    ImagePlane(int height, int width, double fill = 0.0);

    static ImagePlane from_values(int height, int width, std::vector<double> values);

    int height() const { return height_; }
    int width() const { return width_; }

    double at(int y, int x) const {
        return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
    }
    double& at(int y, int x) {
        return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
    }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

private:
    int height_;
    int width_;
    std::vector<double> values_;
};

enum class BoundaryMode {
    zero_pad_same,  // out-of-bounds reads 0, output keeps the input shape
    reflect_same,   // coordinates mirrored about the edge pixels (gfedcb|abcdefg|fedcb)
    valid           // no padding, output shrinks by the kernel radius
};

std::string_view boundary_mode_name(BoundaryMode mode);
BoundaryMode parse_boundary_mode(std::string_view name);

} // namespace sigmafilt
