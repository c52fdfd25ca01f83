#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sigmafilt/dynamic.hpp"
#include "sigmafilt/image.hpp"
#include "sigmafilt/kernel.hpp"
#include "sigmafilt/optimize.hpp"

namespace sigmafilt {

// PGM images (P2 ASCII or P5 binary), maxval 255 or 65535. Values map
// linearly to [0, 1] on read and are clamped and quantized on write, so a
// round trip is exact to half a quantization step.

ImagePlane read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const ImagePlane& image, int maxval = 65535);

/// Raw little-endian tensor file: magic "GFT1", u32 ndim (1..3), u32 dims,
/// then float64 payload in row-major order.
struct RawTensor {
    std::vector<std::uint32_t> dims;
    std::vector<double> data;
};

RawTensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const RawTensor& tensor);

/// Covariance fields travel as (H, W, d) tensors, d = 1/2/3 selecting the
/// family, values in log-Cholesky coordinates.
CovField read_cov_field(const std::filesystem::path& path);
void write_cov_field(const std::filesystem::path& path, const CovField& field);

ImagePlane tensor_to_image(const RawTensor& tensor);
RawTensor image_to_tensor(const ImagePlane& image);

// Kernel CSV: header "# ry=<ry> rx=<rx> kind=<kind>", then one line per
// grid row with 17-significant-digit coefficients.

void write_kernel_csv(std::ostream& out, const KernelGrid& kernel);
void write_kernel_csv(const std::filesystem::path& path, const KernelGrid& kernel);
KernelGrid read_kernel_csv(std::istream& in);
KernelGrid read_kernel_csv(const std::filesystem::path& path);

/// Trajectory CSV: header "step,loss,grad_norm,p1[,p2[,p3]]", one row per
/// iterate, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& trajectory);
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory);

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double value);

} // namespace sigmafilt
