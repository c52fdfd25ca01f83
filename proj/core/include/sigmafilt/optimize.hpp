#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sigmafilt/filtering.hpp"

namespace sigmafilt {

/// Small fixed-capacity vector matching a CovParams coordinate count;
/// used for gradients and optimizer velocity.
struct ParamVec {
    std::array<double, 3> v{};
    int count = 0;

    static ParamVec zeros(int count);

    int size() const { return count; }
    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }

    double norm() const;
};

struct RecoveryConfig {
    CovFamily family = CovFamily::spherical;
    CovParams init = CovParams::spherical(-0.6931471805599453); // log 0.5, a smoothed delta
    double learning_rate = 0.35;
    double momentum = 0.9;
    int steps = 300;
    int loss_margin = 8;

    void validate() const;
};

struct TrajectoryPoint {
    int step;
    CovParams params;
    double loss;
    double grad_norm;
};

/// Mean squared difference over the interior rectangle that excludes
/// `margin` pixels per side. Throws ShapeError on shape mismatch or when
/// the margin leaves no interior.
double mse_loss(const ImagePlane& pred, const ImagePlane& target, int margin);

struct LossGrad {
    double loss = 0.0;
    ParamVec grad;
};

/// Forward pass conv2d(reference, gaussian_kernel(params), zero_pad_same)
/// against `target`, with the analytic gradient of the interior MSE with
/// respect to the log-Cholesky coordinates. The support radius is frozen
/// for the evaluation; pass radius_override to pin it across evaluations
/// (finite-difference checks need this because ceil(2 sigma) is piecewise
/// constant).
LossGrad loss_and_grad(const ImagePlane& reference, const ImagePlane& target,
                       const CovParams& params, int margin,
                       std::optional<Radius> radius_override = {});

/// Classic momentum update: v' = momentum * v - lr * grad, p' = p + v'.
std::pair<CovParams, ParamVec> sgd_momentum_step(const CovParams& params, const ParamVec& grad,
                                                 const ParamVec& velocity, double lr,
                                                 double momentum);

/// Thrown when the recovery loss becomes non-finite; carries the iterates
/// recorded up to the failure.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::vector<TrajectoryPoint> trajectory)
        : Error(what), trajectory_(std::move(trajectory)) {}

    const std::vector<TrajectoryPoint>& trajectory() const { return trajectory_; }

private:
    std::vector<TrajectoryPoint> trajectory_;
};

/// Gradient recovery of an unknown Gaussian blur: which covariance maps
/// `reference` onto `blurred`? Runs `steps` momentum updates and records
/// every iterate, including the final one (steps + 1 points).
std::vector<TrajectoryPoint> recover_blur(const ImagePlane& reference, const ImagePlane& blurred,
                                          const RecoveryConfig& config);

} // namespace sigmafilt
