#include "sigmafilt/dynamic.hpp"

#include <cmath>

#include "parallel.hpp"
#include "sampling.hpp"

namespace sigmafilt {

CovField::CovField(int height, int width, CovFamily family)
    : height_(height), width_(width), family_(family), d_(::sigmafilt::param_count(family)),
      p_(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
             static_cast<std::size_t>(d_),
         0.0) {
    if (height < 1 || width < 1) {
        throw ShapeError("covariance field dimensions must be at least 1x1");
    }
}

CovField CovField::constant(int height, int width, const CovParams& params) {
    CovField field(height, width, params.family());
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            field.set(y, x, params);
        }
    }
    return field;
}

CovParams CovField::at(int y, int x) const {
    return CovParams(family_, std::span<const double>(&p_[index(y, x, 0)],
                                                      static_cast<std::size_t>(d_)));
}

void CovField::set(int y, int x, const CovParams& params) {
    if (params.family() != family_) {
        throw FamilyError("covariance field holds family " + std::string(family_name(family_)) +
                          ", got " + std::string(family_name(params.family())));
    }
    for (int i = 0; i < d_; ++i) {
        p_[index(y, x, i)] = params[i];
    }
}

TapWeights TapWeights::center_only() {
    TapWeights t;
    t.w[0] = 1.0;
    return t;
}

TapWeights TapWeights::averaging() {
    TapWeights t;
    t.w.fill(1.0 / 9.0);
    return t;
}

std::array<Vec2, 9> base_ring() {
    // Offset i = (sin theta, cos theta), theta = 2 pi (i - 1) / 8,
    // counter-clockwise in y-down image coordinates.
    constexpr double s = 0.70710678118654752440; // sqrt(2)/2
    return {{{0.0, 0.0},
             {0.0, 1.0},
             {s, s},
             {1.0, 0.0},
             {s, -s},
             {0.0, -1.0},
             {-s, -s},
             {-1.0, 0.0},
             {-s, s}}};
}

std::array<Vec2, 9> warp_offsets(const CovMatrix& cov) {
    const Mat2 a = cholesky_factor(cov);
    std::array<Vec2, 9> out = base_ring();
    for (Vec2& o : out) {
        o = a.apply(o);
    }
    return out;
}

double bilinear_sample(const ImagePlane& image, double y, double x) {
    if (std::isnan(y) || std::isnan(x)) {
        throw DomainError("bilinear_sample: NaN coordinate");
    }
    return detail::bilinear_zero(image, y, x);
}

Vec2 bilinear_sample_grad(const ImagePlane& image, double y, double x) {
    if (std::isnan(y) || std::isnan(x)) {
        throw DomainError("bilinear_sample_grad: NaN coordinate");
    }
    Vec2 g;
    detail::bilinear_zero_grad(image, y, x, g.y, g.x);
    return g;
}

namespace {

void check_field_shape(const ImagePlane& image, const CovField& field) {
    if (field.height() != image.height() || field.width() != image.width()) {
        throw ShapeError("covariance field " + std::to_string(field.height()) + "x" +
                         std::to_string(field.width()) + " does not match image " +
                         std::to_string(image.height()) + "x" + std::to_string(image.width()));
    }
}

} // namespace

ImagePlane dynamic_gauss_conv(const ImagePlane& image, const CovField& field,
                              const TapWeights& weights) {
    check_field_shape(image, field);
    const int h = image.height();
    const int w = image.width();

    ImagePlane out(h, w);
    detail::parallel_for(h, static_cast<std::size_t>(w) * 16, [&](int y) {
        for (int x = 0; x < w; ++x) {
            const std::array<Vec2, 9> taps = warp_offsets(params_to_matrix(field.at(y, x)));
            double acc = 0.0;
            for (int i = 0; i < 9; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                acc += weights.w[ui] * detail::bilinear_zero(image, y + taps[ui].y, x + taps[ui].x);
            }
            out.at(y, x) = acc;
        }
    });
    return out;
}

DynamicGrads dynamic_gauss_conv_backward(const ImagePlane& image, const CovField& field,
                                         const TapWeights& weights,
                                         const ImagePlane& upstream_grad) {
    check_field_shape(image, field);
    if (upstream_grad.height() != image.height() || upstream_grad.width() != image.width()) {
        throw ShapeError("upstream gradient shape does not match image");
    }
    const int h = image.height();
    const int w = image.width();
    const int d = field.param_count();

    DynamicGrads grads;
    grads.field.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                           static_cast<std::size_t>(d),
                       0.0);

    const std::array<Vec2, 9> ring = base_ring();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double up = upstream_grad.at(y, x);
            const CovParams params = field.at(y, x);
            const CovMatrix cov = params_to_matrix(params);
            const Mat2 a = cholesky_factor(cov);
            const PartialSet parts = matrix_partials(params);

            // dA/dp_j from the Cholesky chain, once per pixel
            std::array<Mat2, 3> da{};
            for (int j = 0; j < d; ++j) {
                da[static_cast<std::size_t>(j)] = cholesky_factor_directional(cov, parts[j]);
            }

            for (int i = 0; i < 9; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const Vec2 tap = a.apply(ring[ui]);
                const double sy = y + tap.y;
                const double sx = x + tap.x;
                grads.weights[ui] += up * detail::bilinear_zero(image, sy, sx);

                if (up == 0.0 || weights.w[ui] == 0.0) {
                    continue;
                }
                double gy = 0.0;
                double gx = 0.0;
                detail::bilinear_zero_grad(image, sy, sx, gy, gx);
                if (gy == 0.0 && gx == 0.0) {
                    continue;
                }
                const double scale = up * weights.w[ui];
                for (int j = 0; j < d; ++j) {
                    const Vec2 dtap = da[static_cast<std::size_t>(j)].apply(ring[ui]);
                    grads.field[(static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                                 static_cast<std::size_t>(x)) *
                                    static_cast<std::size_t>(d) +
                                static_cast<std::size_t>(j)] +=
                        scale * (gy * dtap.y + gx * dtap.x);
                }
            }
        }
    }
    return grads;
}

} // namespace sigmafilt
