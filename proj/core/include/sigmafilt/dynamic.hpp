#pragma once

#include <array>

#include "sigmafilt/image.hpp"
#include "sigmafilt/covariance.hpp"

namespace sigmafilt {

/// Per-pixel log-Cholesky covariance parameters over an image, stored flat
/// as H x W x d with d = param_count(family). Drives covariance-warped
/// sampling; the field itself is an input (typically regressed upstream).
class CovField {
public:
    CovField(int height, int width, CovFamily family);

    static CovField constant(int height, int width, const CovParams& params);

    int height() const { return height_; }
    int width() const { return width_; }
    CovFamily family() const { return family_; }
    int param_count() const { return d_; }

    CovParams at(int y, int x) const;
    void set(int y, int x, const CovParams& params);

    double param(int y, int x, int i) const { return p_[index(y, x, i)]; }
    double& param(int y, int x, int i) { return p_[index(y, x, i)]; }

    std::span<const double> raw() const { return p_; }
    std::span<double> raw() { return p_; }

private:
    std::size_t index(int y, int x, int i) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(d_) +
               static_cast<std::size_t>(i);
    }

    int height_;
    int width_;
    CovFamily family_;
    int d_;
    std::vector<double> p_;
};

/// Nine free-form tap values: index 0 is the center, indices 1..8 follow
/// the unit ring counter-clockwise in y-down image coordinates, starting
/// at angle 0 on the +x axis (offset i = (sin theta_i, cos theta_i) with
/// theta_i = 2 pi (i - 1) / 8).
struct TapWeights {
    std::array<double, 9> w{};

    static TapWeights center_only();
    static TapWeights averaging(); // 1/9 each
};

/// The default sampling pattern: one point at the origin and a ring of
/// eight points on the unit circle at equal distances and angles.
std::array<Vec2, 9> base_ring();

/// Base ring mapped through A = cholesky_factor(cov): identity covariance
/// keeps the unit ring, spherical sigma^2 scales it to radius sigma,
/// diagonal/full stretch it into an axis-aligned/slanted ellipse.
std::array<Vec2, 9> warp_offsets(const CovMatrix& cov);

/// Bilinear interpolation with zero-valued phantom pixels outside the
/// image. Throws DomainError on NaN coordinates.
double bilinear_sample(const ImagePlane& image, double y, double x);

/// Derivative of bilinear_sample with respect to (y, x); piecewise
/// constant inside each bilinear cell.
Vec2 bilinear_sample_grad(const ImagePlane& image, double y, double x);

/// Deformable sampling constrained to Gaussian structure:
///   out(p) = sum_i w_i * bilinear(image, p + warp_offsets(Sigma(field(p)))_i)
ImagePlane dynamic_gauss_conv(const ImagePlane& image, const CovField& field,
                              const TapWeights& weights);

struct DynamicGrads {
    /// d<upstream, out>/d field, laid out like CovField::raw() (H x W x d).
    std::vector<double> field;
    std::array<double, 9> weights{};
};

/// Backward pass of dynamic_gauss_conv for the covariance field and the
/// tap weights, via the chain through bilinear sampling, the warp (linear
/// in A), the Cholesky factor, and the log-Cholesky partials.
DynamicGrads dynamic_gauss_conv_backward(const ImagePlane& image, const CovField& field,
                                         const TapWeights& weights,
                                         const ImagePlane& upstream_grad);

} // namespace sigmafilt
