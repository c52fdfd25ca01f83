#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "sigmafilt/errors.hpp"

namespace sigmafilt {

// Shared coordinate convention: index order is (y, x), matrix row/column 0
// is the y axis, and y grows downward in image coordinates.

enum class CovFamily { spherical, diagonal, full };

/// Number of unconstrained parameters: 1 (spherical), 2 (diagonal), 3 (full).
int param_count(CovFamily family);

std::string_view family_name(CovFamily family);

/// Parses "sph", "diag" or "full" (also accepts "spherical"/"diagonal").
CovFamily parse_family(std::string_view name);

struct Vec2 {
    double y = 0.0;
    double x = 0.0;
};

/// General 2x2 matrix, m[0][*] is the y row.
struct Mat2 {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    Vec2 apply(Vec2 v) const {
        return {m[0][0] * v.y + m[0][1] * v.x, m[1][0] * v.y + m[1][1] * v.x};
    }
};

/// Symmetric 2x2 matrix (derivatives of a covariance are symmetric but in
/// general not positive definite, hence a type distinct from CovMatrix).
struct Sym2 {
    double yy = 0.0;
    double xx = 0.0;
    double xy = 0.0;
};

/// Unconstrained log-Cholesky coordinates of a 2x2 covariance.
///
/// The covariance factors as Sigma = U'U with U upper triangular and a
/// positive diagonal stored as its log:
///   full:      (a, b, c) with U = [[e^a, b], [0, e^c]]
///   diagonal:  (py, px)  with U = diag(e^py, e^px)
///   spherical: (p)       with U = e^p * I, so p = log sigma
/// Any finite coordinate vector maps to a valid SPD matrix.
class CovParams {
public:
    CovParams(CovFamily family, std::span<const double> values);

    static CovParams spherical(double log_sigma);
    static CovParams diagonal(double log_uy, double log_ux);
    static CovParams full(double a, double b, double c);

    CovFamily family() const { return family_; }
    int size() const { return count_; }

    double operator[](int i) const { return p_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return p_[static_cast<std::size_t>(i)]; }

    std::span<const double> values() const { return {p_.data(), static_cast<std::size_t>(count_)}; }

    friend bool operator==(const CovParams&, const CovParams&) = default;

private:
    CovFamily family_;
    int count_;
    std::array<double, 3> p_{};
};

/// Concrete 2x2 symmetric spatial covariance: [[syy, sxy], [sxy, sxx]],
/// entries in pixels^2. Aggregate on purpose; operations that require
/// positive definiteness validate it and throw DomainError.
struct CovMatrix {
    double syy = 1.0;
    double sxx = 1.0;
    double sxy = 0.0;

    bool is_spd() const;

    friend bool operator==(const CovMatrix&, const CovMatrix&) = default;
};

/// Fixed-capacity list of the per-parameter partials dSigma/dp_i.
struct PartialSet {
    std::array<Sym2, 3> d{};
    int count = 0;

    int size() const { return count; }
    const Sym2& operator[](int i) const { return d[static_cast<std::size_t>(i)]; }
    const Sym2* begin() const { return d.data(); }
    const Sym2* end() const { return d.data() + count; }
};

/// Forward map of the log-Cholesky coordinates. Total on finite inputs;
/// the result is SPD for every finite parameter vector.
CovMatrix params_to_matrix(const CovParams& params);

/// Inverse of params_to_matrix via Cholesky factorization.
/// Throws DomainError for non-SPD input and FamilyError when the input
/// cannot be represented in the requested family (sxy != 0 for
/// diagonal/spherical, syy != sxx for spherical).
CovParams matrix_to_params(const CovMatrix& cov, CovFamily family);

/// Exact partials dSigma/dp_i of the forward map, one per parameter.
PartialSet matrix_partials(const CovParams& params);

/// Lower-triangular A with A A^T = cov and positive diagonal.
Mat2 cholesky_factor(const CovMatrix& cov);

/// Directional derivative of cholesky_factor: given dSigma, returns the
/// lower-triangular dA with dA A^T + A dA^T = dSigma.
Mat2 cholesky_factor_directional(const CovMatrix& cov, const Sym2& dcov);

/// Semigroup addition: blurring by `a` then by `b` equals one blur by
/// their elementwise sum.
CovMatrix cascade_add(const CovMatrix& a, const CovMatrix& b);

/// Inverse of an SPD covariance, as a symmetric matrix.
Sym2 inverse(const CovMatrix& cov);

/// Text form used by the CLI and CSV files:
///   "full:a,b,c"  "diag:py,px"  "sph:p"
/// with log-Cholesky coordinates in decimal.
CovParams parse_cov_params(std::string_view text);
std::string format_cov_params(const CovParams& params);

} // namespace sigmafilt
