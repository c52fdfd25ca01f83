#include "sigmafilt/kernel.hpp"

#include <cmath>

namespace sigmafilt {

std::string_view kernel_kind_name(KernelKind kind) {
    switch (kind) {
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::freeform: return "freeform";
    case KernelKind::dog: return "dog";
    case KernelKind::composed: return "composed";
    }
    throw Error("unknown kernel kind");
}

KernelKind parse_kernel_kind(std::string_view name) {
    if (name == "gaussian") return KernelKind::gaussian;
    if (name == "freeform") return KernelKind::freeform;
    if (name == "dog") return KernelKind::dog;
    if (name == "composed") return KernelKind::composed;
    throw ParseError("unknown kernel kind: '" + std::string(name) + "'");
}

KernelGrid::KernelGrid(int ry, int rx, KernelKind kind)
    : ry_(ry), rx_(rx), kind_(kind),
      coeffs_(static_cast<std::size_t>(2 * ry + 1) * static_cast<std::size_t>(2 * rx + 1), 0.0) {
    if (ry < 0 || rx < 0) {
        throw ShapeError("kernel radius must be non-negative");
    }
}

KernelGrid KernelGrid::freeform(int ry, int rx, std::vector<double> coeffs) {
    KernelGrid k(ry, rx, KernelKind::freeform);
    if (coeffs.size() != k.coeffs_.size()) {
        throw ShapeError("freeform kernel needs " + std::to_string(k.coeffs_.size()) +
                         " coefficients, got " + std::to_string(coeffs.size()));
    }
    k.coeffs_ = std::move(coeffs);
    return k;
}

KernelGrid KernelGrid::delta() {
    KernelGrid k(0, 0, KernelKind::freeform);
    k.at(0, 0) = 1.0;
    return k;
}

double KernelGrid::sum() const {
    double s = 0.0;
    for (double c : coeffs_) {
        s += c;
    }
    return s;
}

Radius support_radius(const CovMatrix& cov) {
    if (!cov.is_spd()) {
        throw DomainError("support_radius: covariance is not SPD");
    }
    const double ty = std::ceil(2.0 * std::sqrt(cov.syy));
    const double tx = std::ceil(2.0 * std::sqrt(cov.sxx));
    constexpr double kMaxRadius = 1e6;
    if (!(ty < kMaxRadius) || !(tx < kMaxRadius)) {
        throw DomainError("support_radius: covariance implies an unusably large kernel");
    }
    return {std::max(1, static_cast<int>(ty)), std::max(1, static_cast<int>(tx))};
}

namespace {

Radius resolve_radius(const CovMatrix& cov, const std::optional<Radius>& radius_override) {
    if (radius_override) {
        if (radius_override->ry < 1 || radius_override->rx < 1) {
            throw ShapeError("radius override must be at least 1 per axis");
        }
        return *radius_override;
    }
    return support_radius(cov);
}

// x' Sigma^-1 x at integer offset (dy, dx)
double quad_form(const Sym2& inv, int dy, int dx) {
    return inv.yy * dy * dy + 2.0 * inv.xy * dy * dx + inv.xx * dx * dx;
}

} // namespace

KernelGrid gaussian_kernel(const CovMatrix& cov, std::optional<Radius> radius_override) {
    if (!cov.is_spd()) {
        throw DomainError("gaussian_kernel: covariance is not SPD");
    }
    const Radius r = resolve_radius(cov, radius_override);
    const Sym2 inv = inverse(cov);

    KernelGrid k(r.ry, r.rx, KernelKind::gaussian);
    double sum = 0.0;
    for (int dy = -r.ry; dy <= r.ry; ++dy) {
        for (int dx = -r.rx; dx <= r.rx; ++dx) {
            const double h = std::exp(-0.5 * quad_form(inv, dy, dx));
            k.at(dy, dx) = h;
            sum += h;
        }
    }
    for (int dy = -r.ry; dy <= r.ry; ++dy) {
        for (int dx = -r.rx; dx <= r.rx; ++dx) {
            k.at(dy, dx) /= sum;
        }
    }
    return k;
}

KernelWithGrads gaussian_kernel_with_grads(const CovParams& params,
                                           std::optional<Radius> radius_override) {
    const CovMatrix cov = params_to_matrix(params);
    const Radius r = resolve_radius(cov, radius_override);
    const Sym2 inv = inverse(cov);
    const PartialSet parts = matrix_partials(params);
    const int n = parts.size();

    // Sensitivity of the quadratic form: d(x' Sigma^-1 x)/dp = -x' M x with
    // M = Sigma^-1 dSigma Sigma^-1, so dh/dp = h * x' M x / 2.
    std::array<Sym2, 3> m{};
    for (int i = 0; i < n; ++i) {
        const Sym2& dp = parts[i];
        // t = dSigma * Sigma^-1 (rows of dSigma times columns of inv)
        const double t00 = dp.yy * inv.yy + dp.xy * inv.xy;
        const double t01 = dp.yy * inv.xy + dp.xy * inv.xx;
        const double t10 = dp.xy * inv.yy + dp.xx * inv.xy;
        const double t11 = dp.xy * inv.xy + dp.xx * inv.xx;
        // m = Sigma^-1 * t (symmetric by construction)
        m[static_cast<std::size_t>(i)] = {inv.yy * t00 + inv.xy * t10,
                                          inv.xy * t01 + inv.xx * t11,
                                          inv.yy * t01 + inv.xy * t11};
    }

    KernelWithGrads out{KernelGrid(r.ry, r.rx, KernelKind::gaussian), {}};
    out.grads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out.grads.emplace_back(r.ry, r.rx, KernelKind::freeform);
    }

    double sum = 0.0;
    std::array<double, 3> dsum{};
    for (int dy = -r.ry; dy <= r.ry; ++dy) {
        for (int dx = -r.rx; dx <= r.rx; ++dx) {
            const double h = std::exp(-0.5 * quad_form(inv, dy, dx));
            out.kernel.at(dy, dx) = h;
            sum += h;
            for (int i = 0; i < n; ++i) {
                const double dh = h * 0.5 * quad_form(m[static_cast<std::size_t>(i)], dy, dx);
                out.grads[static_cast<std::size_t>(i)].at(dy, dx) = dh;
                dsum[static_cast<std::size_t>(i)] += dh;
            }
        }
    }

    // Quotient rule for k = h / sum(h): dk = (dh - k * sum(dh)) / sum(h).
    for (int dy = -r.ry; dy <= r.ry; ++dy) {
        for (int dx = -r.rx; dx <= r.rx; ++dx) {
            const double k = out.kernel.at(dy, dx) / sum;
            out.kernel.at(dy, dx) = k;
            for (int i = 0; i < n; ++i) {
                KernelGrid& g = out.grads[static_cast<std::size_t>(i)];
                g.at(dy, dx) = (g.at(dy, dx) - k * dsum[static_cast<std::size_t>(i)]) / sum;
            }
        }
    }
    return out;
}

SeparablePair separable_1d(const CovMatrix& cov) {
    if (!cov.is_spd()) {
        throw DomainError("separable_1d: covariance is not SPD");
    }
    if (cov.sxy != 0.0) {
        throw DomainError("separable_1d: not separable, covariance has sxy != 0");
    }
    const Radius r = support_radius(cov);

    auto axis = [](int radius, double variance) {
        Kernel1D k{radius, std::vector<double>(static_cast<std::size_t>(2 * radius + 1), 0.0)};
        double sum = 0.0;
        for (int d = -radius; d <= radius; ++d) {
            const double h = std::exp(-0.5 * d * d / variance);
            k.taps[static_cast<std::size_t>(d + radius)] = h;
            sum += h;
        }
        for (double& t : k.taps) {
            t /= sum;
        }
        return k;
    };
    return {axis(r.ry, cov.syy), axis(r.rx, cov.sxx)};
}

KernelGrid dog_kernel(const CovMatrix& center, const CovMatrix& surround) {
    if (!center.is_spd() || !surround.is_spd()) {
        throw DomainError("dog_kernel: covariance is not SPD");
    }
    if (surround.syy < center.syy || surround.sxx < center.sxx) {
        throw DomainError("dog_kernel: surround must be at least as large as center per axis");
    }
    const Radius r = support_radius(surround);
    const KernelGrid kc = gaussian_kernel(center, r);
    const KernelGrid ks = gaussian_kernel(surround, r);

    KernelGrid out(r.ry, r.rx, KernelKind::dog);
    for (int dy = -r.ry; dy <= r.ry; ++dy) {
        for (int dx = -r.rx; dx <= r.rx; ++dx) {
            out.at(dy, dx) = kc.at(dy, dx) - ks.at(dy, dx);
        }
    }
    return out;
}

KernelGrid compose_kernels(const KernelGrid& g, const KernelGrid& f) {
    KernelGrid out(g.ry() + f.ry(), g.rx() + f.rx(), KernelKind::composed);
    for (int gy = -g.ry(); gy <= g.ry(); ++gy) {
        for (int gx = -g.rx(); gx <= g.rx(); ++gx) {
            const double w = g.at(gy, gx);
            if (w == 0.0) {
                continue;
            }
            for (int fy = -f.ry(); fy <= f.ry(); ++fy) {
                for (int fx = -f.rx(); fx <= f.rx(); ++fx) {
                    out.at(gy + fy, gx + fx) += w * f.at(fy, fx);
                }
            }
        }
    }
    return out;
}

} // namespace sigmafilt
