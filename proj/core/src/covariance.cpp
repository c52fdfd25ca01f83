#include "sigmafilt/covariance.hpp"

#include <cmath>
#include <charconv>
#include <cstdio>

namespace sigmafilt {

namespace {

void require_finite(std::span<const double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError("covariance parameters must be finite");
        }
    }
}

void require_spd(const CovMatrix& cov, const char* who) {
    if (!cov.is_spd()) {
        throw DomainError(std::string(who) + ": covariance is not symmetric positive definite");
    }
}

} // namespace

int param_count(CovFamily family) {
    switch (family) {
    case CovFamily::spherical: return 1;
    case CovFamily::diagonal: return 2;
    case CovFamily::full: return 3;
    }
    throw FamilyError("unknown covariance family");
}

std::string_view family_name(CovFamily family) {
    switch (family) {
    case CovFamily::spherical: return "sph";
    case CovFamily::diagonal: return "diag";
    case CovFamily::full: return "full";
    }
    throw FamilyError("unknown covariance family");
}

CovFamily parse_family(std::string_view name) {
    if (name == "sph" || name == "spherical") return CovFamily::spherical;
    if (name == "diag" || name == "diagonal") return CovFamily::diagonal;
    if (name == "full") return CovFamily::full;
    throw ParseError("unknown covariance family: '" + std::string(name) + "'");
}

CovParams::CovParams(CovFamily family, std::span<const double> values)
    : family_(family), count_(param_count(family)) {
    if (static_cast<int>(values.size()) != count_) {
        throw FamilyError("family " + std::string(family_name(family)) + " takes " +
                          std::to_string(count_) + " parameters, got " +
                          std::to_string(values.size()));
    }
    require_finite(values);
    for (int i = 0; i < count_; ++i) {
        p_[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(i)];
    }
}

CovParams CovParams::spherical(double log_sigma) {
    const double v[] = {log_sigma};
    return CovParams(CovFamily::spherical, v);
}

CovParams CovParams::diagonal(double log_uy, double log_ux) {
    const double v[] = {log_uy, log_ux};
    return CovParams(CovFamily::diagonal, v);
}

CovParams CovParams::full(double a, double b, double c) {
    const double v[] = {a, b, c};
    return CovParams(CovFamily::full, v);
}

bool CovMatrix::is_spd() const {
    return std::isfinite(syy) && std::isfinite(sxx) && std::isfinite(sxy) &&
           syy > 0.0 && sxx > 0.0 && syy * sxx - sxy * sxy > 0.0;
}

CovMatrix params_to_matrix(const CovParams& params) {
    switch (params.family()) {
    case CovFamily::spherical: {
        const double s = std::exp(2.0 * params[0]);
        return {s, s, 0.0};
    }
    case CovFamily::diagonal:
        return {std::exp(2.0 * params[0]), std::exp(2.0 * params[1]), 0.0};
    case CovFamily::full: {
        // Sigma = U'U with U = [[e^a, b], [0, e^c]]
        const double u11 = std::exp(params[0]);
        const double b = params[1];
        const double u22 = std::exp(params[2]);
        return {u11 * u11, b * b + u22 * u22, b * u11};
    }
    }
    throw FamilyError("unknown covariance family");
}

CovParams matrix_to_params(const CovMatrix& cov, CovFamily family) {
    require_spd(cov, "matrix_to_params");
    switch (family) {
    case CovFamily::spherical:
        if (cov.sxy != 0.0) {
            throw FamilyError("matrix_to_params: spherical family requires sxy = 0");
        }
        if (cov.syy != cov.sxx) {
            throw FamilyError("matrix_to_params: spherical family requires syy = sxx");
        }
        return CovParams::spherical(0.5 * std::log(cov.syy));
    case CovFamily::diagonal:
        if (cov.sxy != 0.0) {
            throw FamilyError("matrix_to_params: diagonal family requires sxy = 0");
        }
        return CovParams::diagonal(0.5 * std::log(cov.syy), 0.5 * std::log(cov.sxx));
    case CovFamily::full: {
        const Mat2 a = cholesky_factor(cov);
        // U = A^T, so (a, b, c) = (log A00, A10, log A11)
        return CovParams::full(std::log(a.m[0][0]), a.m[1][0], std::log(a.m[1][1]));
    }
    }
    throw FamilyError("unknown covariance family");
}

PartialSet matrix_partials(const CovParams& params) {
    PartialSet out;
    out.count = params.size();
    switch (params.family()) {
    case CovFamily::spherical: {
        const double s = 2.0 * std::exp(2.0 * params[0]);
        out.d[0] = {s, s, 0.0};
        return out;
    }
    case CovFamily::diagonal:
        out.d[0] = {2.0 * std::exp(2.0 * params[0]), 0.0, 0.0};
        out.d[1] = {0.0, 2.0 * std::exp(2.0 * params[1]), 0.0};
        return out;
    case CovFamily::full: {
        const double ea = std::exp(params[0]);
        const double b = params[1];
        const double ec = std::exp(params[2]);
        out.d[0] = {2.0 * ea * ea, 0.0, b * ea};
        out.d[1] = {0.0, 2.0 * b, ea};
        out.d[2] = {0.0, 2.0 * ec * ec, 0.0};
        return out;
    }
    }
    throw FamilyError("unknown covariance family");
}

Mat2 cholesky_factor(const CovMatrix& cov) {
    require_spd(cov, "cholesky_factor");
    Mat2 a;
    a.m[0][0] = std::sqrt(cov.syy);
    a.m[0][1] = 0.0;
    a.m[1][0] = cov.sxy / a.m[0][0];
    a.m[1][1] = std::sqrt(cov.sxx - a.m[1][0] * a.m[1][0]);
    return a;
}

Mat2 cholesky_factor_directional(const CovMatrix& cov, const Sym2& dcov) {
    const Mat2 a = cholesky_factor(cov);
    Mat2 da;
    da.m[0][0] = dcov.yy / (2.0 * a.m[0][0]);
    da.m[0][1] = 0.0;
    da.m[1][0] = (dcov.xy - a.m[1][0] * da.m[0][0]) / a.m[0][0];
    da.m[1][1] = (dcov.xx - 2.0 * a.m[1][0] * da.m[1][0]) / (2.0 * a.m[1][1]);
    return da;
}

CovMatrix cascade_add(const CovMatrix& a, const CovMatrix& b) {
    return {a.syy + b.syy, a.sxx + b.sxx, a.sxy + b.sxy};
}

Sym2 inverse(const CovMatrix& cov) {
    require_spd(cov, "inverse");
    const double det = cov.syy * cov.sxx - cov.sxy * cov.sxy;
    return {cov.sxx / det, cov.syy / det, -cov.sxy / det};
}

namespace {

double parse_number(std::string_view text) {
    // std::from_chars(double) handles "1e-3", "-2", "0.693147", ...
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("bad number: '" + std::string(text) + "'");
    }
    return value;
}

} // namespace

CovParams parse_cov_params(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ParseError("covariance spec needs the form family:p1[,p2[,p3]], got '" +
                         std::string(text) + "'");
    }
    const CovFamily family = parse_family(text.substr(0, colon));
    std::string_view rest = text.substr(colon + 1);

    std::array<double, 3> values{};
    int n = 0;
    while (!rest.empty()) {
        if (n == 3) {
            throw ParseError("too many covariance parameters in '" + std::string(text) + "'");
        }
        const auto comma = rest.find(',');
        const std::string_view token = rest.substr(0, comma);
        values[static_cast<std::size_t>(n++)] = parse_number(token);
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
        if (rest.empty()) {
            throw ParseError("trailing comma in covariance spec '" + std::string(text) + "'");
        }
    }
    if (n != param_count(family)) {
        throw ParseError("family " + std::string(family_name(family)) + " takes " +
                         std::to_string(param_count(family)) + " parameters, got " +
                         std::to_string(n));
    }
    if (!std::isfinite(values[0]) || !std::isfinite(values[1]) || !std::isfinite(values[2])) {
        throw DomainError("covariance parameters must be finite");
    }
    return CovParams(family, std::span<const double>(values.data(), static_cast<std::size_t>(n)));
}

std::string format_cov_params(const CovParams& params) {
    std::string out(family_name(params.family()));
    out += ':';
    char buf[32];
    for (int i = 0; i < params.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        std::snprintf(buf, sizeof(buf), "%.17g", params[i]);
        out += buf;
    }
    return out;
}

} // namespace sigmafilt
