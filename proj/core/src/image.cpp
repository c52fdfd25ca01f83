#include "sigmafilt/image.hpp"

#include "sigmafilt/errors.hpp"

namespace sigmafilt {

ImagePlane::ImagePlane(int height, int width, double fill)
    : height_(height), width_(width),
      values_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill) {
    if (height < 1 || width < 1) {
        throw ShapeError("image dimensions must be at least 1x1");
    }
}

ImagePlane ImagePlane::from_values(int height, int width, std::vector<double> values) {
    ImagePlane img(height, width);
    if (values.size() != img.values_.size()) {
        throw ShapeError("image needs " + std::to_string(img.values_.size()) +
                         " values, got " + std::to_string(values.size()));
    }
    img.values_ = std::move(values);
    return img;
}

std::string_view boundary_mode_name(BoundaryMode mode) {
    switch (mode) {
    case BoundaryMode::zero_pad_same: return "zero";
    case BoundaryMode::reflect_same: return "reflect";
    case BoundaryMode::valid: return "valid";
    }
    throw Error("unknown boundary mode");
}

BoundaryMode parse_boundary_mode(std::string_view name) {
    if (name == "zero" || name == "zero_pad_same") return BoundaryMode::zero_pad_same;
    if (name == "reflect" || name == "reflect_same") return BoundaryMode::reflect_same;
    if (name == "valid") return BoundaryMode::valid;
    throw ParseError("unknown boundary mode: '" + std::string(name) + "'");
}

} // namespace sigmafilt
