#include "sigmafilt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sigmafilt {

ParamVec ParamVec::zeros(int count) {
    ParamVec v;
    v.count = count;
    return v;
}

double ParamVec::norm() const {
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
        s += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    return std::sqrt(s);
}

void RecoveryConfig::validate() const {
    if (init.family() != family) {
        throw FamilyError("recovery init family does not match config family");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw DomainError("learning_rate must be positive");
    }
    if (momentum < 0.0 || momentum >= 1.0) {
        throw DomainError("momentum must be in [0, 1)");
    }
    if (steps < 1) {
        throw DomainError("steps must be >= 1");
    }
    if (loss_margin < 0) {
        throw DomainError("loss_margin must be >= 0");
    }
}

namespace {

struct Interior {
    int y0, y1, x0, x1; // half-open

    int count() const { return (y1 - y0) * (x1 - x0); }
};

Interior interior_rect(const ImagePlane& a, const ImagePlane& b, int margin) {
    if (a.height() != b.height() || a.width() != b.width()) {
        throw ShapeError("images must have equal shapes, got " + std::to_string(a.height()) +
                         "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                         "x" + std::to_string(b.width()));
    }
    if (margin < 0) {
        throw ShapeError("margin must be >= 0");
    }
    Interior r{margin, a.height() - margin, margin, a.width() - margin};
    if (r.y1 <= r.y0 || r.x1 <= r.x0) {
        throw ShapeError("margin " + std::to_string(margin) + " leaves no interior in a " +
                         std::to_string(a.height()) + "x" + std::to_string(a.width()) + " image");
    }
    return r;
}

} // namespace

double mse_loss(const ImagePlane& pred, const ImagePlane& target, int margin) {
    const Interior r = interior_rect(pred, target, margin);
    double acc = 0.0;
    for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
            const double d = pred.at(y, x) - target.at(y, x);
            acc += d * d;
        }
    }
    return acc / r.count();
}

LossGrad loss_and_grad(const ImagePlane& reference, const ImagePlane& target,
                       const CovParams& params, int margin,
                       std::optional<Radius> radius_override) {
    const Interior r = interior_rect(reference, target, margin);
    const KernelWithGrads kg = gaussian_kernel_with_grads(params, radius_override);
    const ImagePlane pred = conv2d(reference, kg.kernel, BoundaryMode::zero_pad_same);

    const int h = reference.height();
    const int w = reference.width();
    const double inv_n = 1.0 / r.count();

    double loss = 0.0;
    ImagePlane residual(h, w); // 2 (pred - target) / N on the interior, 0 outside
    for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
            const double d = pred.at(y, x) - target.at(y, x);
            loss += d * d;
            residual.at(y, x) = 2.0 * d * inv_n;
        }
    }
    loss *= inv_n;

    // dL/dk(o) is the cross-correlation of the reference with the interior
    // residual at offset o; the reference reads as zero outside its bounds,
    // consistent with the zero-padded forward convolution.
    const int ry = kg.kernel.ry();
    const int rx = kg.kernel.rx();
    LossGrad out{loss, ParamVec::zeros(params.size())};
    for (int oy = -ry; oy <= ry; ++oy) {
        for (int ox = -rx; ox <= rx; ++ox) {
            double dldk = 0.0;
            for (int y = r.y0; y < r.y1; ++y) {
                const int sy = y - oy;
                if (sy < 0 || sy >= h) {
                    continue;
                }
                for (int x = r.x0; x < r.x1; ++x) {
                    const int sx = x - ox;
                    if (sx < 0 || sx >= w) {
                        continue;
                    }
                    dldk += residual.at(y, x) * reference.at(sy, sx);
                }
            }
            for (int i = 0; i < params.size(); ++i) {
                out.grad[i] += dldk * kg.grads[static_cast<std::size_t>(i)].at(oy, ox);
            }
        }
    }
    return out;
}

std::pair<CovParams, ParamVec> sgd_momentum_step(const CovParams& params, const ParamVec& grad,
                                                 const ParamVec& velocity, double lr,
                                                 double momentum) {
    if (grad.size() != params.size() || velocity.size() != params.size()) {
        throw ShapeError("gradient/velocity size does not match parameter count");
    }
    CovParams next = params;
    ParamVec v = velocity;
    for (int i = 0; i < params.size(); ++i) {
        v[i] = momentum * velocity[i] - lr * grad[i];
        next[i] = params[i] + v[i];
    }
    return {next, v};
}

std::vector<TrajectoryPoint> recover_blur(const ImagePlane& reference, const ImagePlane& blurred,
                                          const RecoveryConfig& config) {
    config.validate();
    const Interior r = interior_rect(reference, blurred, config.loss_margin);

    double lo = reference.at(r.y0, r.x0);
    double hi = lo;
    for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
            lo = std::min(lo, reference.at(y, x));
            hi = std::max(hi, reference.at(y, x));
        }
    }
    if (lo == hi) {
        throw DomainError("recover_blur: reference interior is constant, the loss is flat");
    }

    std::vector<TrajectoryPoint> trajectory;
    trajectory.reserve(static_cast<std::size_t>(config.steps) + 1);

    CovParams params = config.init;
    ParamVec velocity = ParamVec::zeros(params.size());
    for (int step = 0; step <= config.steps; ++step) {
        LossGrad lg;
        try {
            lg = loss_and_grad(reference, blurred, params, config.loss_margin);
        } catch (const DomainError& e) {
            throw DivergenceError(std::string("recovery diverged at step ") +
                                      std::to_string(step) + ": " + e.what(),
                                  std::move(trajectory));
        }
        if (!std::isfinite(lg.loss)) {
            throw DivergenceError("recovery loss became non-finite at step " +
                                      std::to_string(step),
                                  std::move(trajectory));
        }
        trajectory.push_back({step, params, lg.loss, lg.grad.norm()});
        if (step < config.steps) {
            std::tie(params, velocity) =
                sgd_momentum_step(params, lg.grad, velocity, config.learning_rate, config.momentum);
        }
    }
    return trajectory;
}

} // namespace sigmafilt
