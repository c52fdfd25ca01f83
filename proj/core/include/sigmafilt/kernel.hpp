#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sigmafilt/covariance.hpp"

namespace sigmafilt {

enum class KernelKind { gaussian, freeform, dog, composed };

std::string_view kernel_kind_name(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// Odd-sized, center-anchored grid of filter coefficients.
/// Offsets run dy in [-ry, ry], dx in [-rx, rx]; (0, 0) is the anchor.
class KernelGrid {
public:
    KernelGrid(int ry, int rx, KernelKind kind);

    static KernelGrid freeform(int ry, int rx, std::vector<double> coeffs);

    /// 1x1 identity filter (the only 1x1 grid the library produces).
    static KernelGrid delta();

    int ry() const { return ry_; }
    int rx() const { return rx_; }
    int height() const { return 2 * ry_ + 1; }
    int width() const { return 2 * rx_ + 1; }
    KernelKind kind() const { return kind_; }

    double at(int dy, int dx) const {
        return coeffs_[static_cast<std::size_t>((dy + ry_) * width() + (dx + rx_))];
    }
    double& at(int dy, int dx) {
        return coeffs_[static_cast<std::size_t>((dy + ry_) * width() + (dx + rx_))];
    }

    double sum() const;
    std::span<const double> coeffs() const { return coeffs_; }

private:
    int ry_;
    int rx_;
    KernelKind kind_;
    std::vector<double> coeffs_;
};

struct Radius {
    int ry = 0;
    int rx = 0;

    friend bool operator==(const Radius&, const Radius&) = default;
};

/// Half sizes covering +-2 sigma per axis: ry = ceil(2 sqrt(syy)),
/// rx = ceil(2 sqrt(sxx)), clamped to at least 1 so the grid is 3x3 or
/// larger even as sigma -> 0.
Radius support_radius(const CovMatrix& cov);

/// Gaussian filter: exp(-x' Sigma^-1 x / 2) evaluated at integer offsets,
/// renormalized to unit sum. The continuous density's 1/(2 pi sqrt(det))
/// prefactor cancels under renormalization and is omitted.
KernelGrid gaussian_kernel(const CovMatrix& cov, std::optional<Radius> radius_override = {});

/// Gaussian grid together with the per-coefficient partials with respect
/// to each log-Cholesky parameter. The support radius is computed from the
/// covariance (or taken from the override) and held fixed, so the grids all
/// share one shape; each gradient grid sums to zero.
struct KernelWithGrads {
    KernelGrid kernel;
    std::vector<KernelGrid> grads;
};

KernelWithGrads gaussian_kernel_with_grads(const CovParams& params,
                                           std::optional<Radius> radius_override = {});

/// Center-anchored 1D kernel, taps run d in [-r, r].
struct Kernel1D {
    int r = 0;
    std::vector<double> taps;
};

struct SeparablePair {
    Kernel1D ky;
    Kernel1D kx;
};

/// Axis factors whose outer product is gaussian_kernel(cov).
/// Requires sxy == 0; throws DomainError("not separable") otherwise.
SeparablePair separable_1d(const CovMatrix& cov);

/// Difference of Gaussians (center-surround): the smaller Gaussian minus
/// the larger one, both rendered on the surround's support so the result
/// sums to zero. Requires surround >= center per axis.
KernelGrid dog_kernel(const CovMatrix& center, const CovMatrix& surround);

/// Full discrete convolution g * f; output half sizes are the sums of the
/// input half sizes.
KernelGrid compose_kernels(const KernelGrid& g, const KernelGrid& f);

} // namespace sigmafilt
