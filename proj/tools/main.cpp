// Command-line surface for the structured Gaussian filtering library.
//
// Exit codes: 0 success, 1 usage/parse error, 2 numerical domain error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sigmafilt/dynamic.hpp"
#include "sigmafilt/filtering.hpp"
#include "sigmafilt/io.hpp"
#include "sigmafilt/optimize.hpp"
#include "sigmafilt/synth.hpp"

namespace sf = sigmafilt;

namespace {

/// Raised by `gradcheck` when the analytic gradients fail the
/// finite-difference comparison.
class GradcheckFailure : public sf::Error {
public:
    using sf::Error::Error;
};

sf::Radius parse_radius(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw sf::ParseError("radius must have the form ry,rx");
    }
    try {
        return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw sf::ParseError("bad radius '" + text + "'");
    }
}

std::vector<double> read_number_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw sf::ParseError("cannot open " + path.string());
    }
    std::vector<double> out;
    std::string token;
    while (in) {
        int c = in.get();
        if (c == EOF || c == ',' || std::isspace(c)) {
            if (!token.empty()) {
                try {
                    out.push_back(std::stod(token));
                } catch (const std::exception&) {
                    throw sf::ParseError(path.string() + ": bad number '" + token + "'");
                }
                token.clear();
            }
            continue;
        }
        token.push_back(static_cast<char>(c));
    }
    return out;
}

double interior_variance(const sf::ImagePlane& img, int margin_y, int margin_x) {
    const int y0 = margin_y;
    const int y1 = img.height() - margin_y;
    const int x0 = margin_x;
    const int x1 = img.width() - margin_x;
    if (y1 <= y0 || x1 <= x0) {
        throw sf::ShapeError("image too small for the interior variance margin");
    }
    const double n = static_cast<double>(y1 - y0) * (x1 - x0);
    double mean = 0.0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            mean += img.at(y, x);
        }
    }
    mean /= n;
    double var = 0.0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double d = img.at(y, x) - mean;
            var += d * d;
        }
    }
    return var / n;
}

// ---------------------------------------------------------------- kernel --

struct KernelArgs {
    std::string cov;
    std::vector<std::string> dog;
    std::string radius;
    std::string out;
};

void run_kernel(const KernelArgs& a) {
    std::optional<sf::Radius> radius;
    if (!a.radius.empty()) {
        radius = parse_radius(a.radius);
    }

    sf::KernelGrid k = [&] {
        if (!a.dog.empty()) {
            const sf::CovMatrix center = sf::params_to_matrix(sf::parse_cov_params(a.dog[0]));
            const sf::CovMatrix surround = sf::params_to_matrix(sf::parse_cov_params(a.dog[1]));
            return sf::dog_kernel(center, surround);
        }
        const sf::CovMatrix cov = sf::params_to_matrix(sf::parse_cov_params(a.cov));
        return sf::gaussian_kernel(cov, radius);
    }();
    sf::write_kernel_csv(a.out, k);
}

// ------------------------------------------------------------------ blur --

struct BlurArgs {
    std::string in;
    std::string cov;
    std::string mode = "zero";
    std::string out;
};

void run_blur(const BlurArgs& a) {
    const sf::ImagePlane img = sf::read_pgm(a.in);
    const sf::CovMatrix cov = sf::params_to_matrix(sf::parse_cov_params(a.cov));
    const sf::BoundaryMode mode = sf::parse_boundary_mode(a.mode);

    sf::ImagePlane out = [&] {
        if (cov.sxy == 0.0) {
            const sf::SeparablePair sep = sf::separable_1d(cov);
            return sf::separable_conv(img, sep.ky, sep.kx, mode);
        }
        return sf::conv2d(img, sf::gaussian_kernel(cov), mode);
    }();
    sf::write_pgm(a.out, out);
}

// --------------------------------------------------------------- recover --

struct RecoverArgs {
    std::string reference;
    std::string blurred;
    std::string family = "sph";
    std::string init;
    double lr = 0.35;
    double momentum = 0.9;
    int steps = 300;
    int margin = 8;
    std::string trace;
};

void run_recover(const RecoverArgs& a) {
    const sf::ImagePlane reference = sf::read_pgm(a.reference);
    const sf::ImagePlane blurred = sf::read_pgm(a.blurred);

    sf::RecoveryConfig config;
    config.family = sf::parse_family(a.family);
    config.init = a.init.empty()
                      ? [&] {
                            // a smoothed delta: small variance per family
                            const double p = std::log(0.5);
                            switch (config.family) {
                            case sf::CovFamily::spherical: return sf::CovParams::spherical(p);
                            case sf::CovFamily::diagonal: return sf::CovParams::diagonal(p, p);
                            case sf::CovFamily::full: return sf::CovParams::full(p, 0.0, p);
                            }
                            throw sf::FamilyError("unknown family");
                        }()
                      : sf::parse_cov_params(a.init);
    config.learning_rate = a.lr;
    config.momentum = a.momentum;
    config.steps = a.steps;
    config.loss_margin = a.margin;

    const std::vector<sf::TrajectoryPoint> trajectory = sf::recover_blur(reference, blurred, config);
    if (!a.trace.empty()) {
        sf::write_trajectory_csv(a.trace, trajectory);
    }

    const sf::TrajectoryPoint& last = trajectory.back();
    const sf::CovMatrix cov = sf::params_to_matrix(last.params);
    std::cout << "final_params " << sf::format_cov_params(last.params) << "\n";
    std::cout << "final_cov syy=" << sf::format_double(cov.syy) << " sxx=" << sf::format_double(cov.sxx)
              << " sxy=" << sf::format_double(cov.sxy) << "\n";
    std::cout << "final_loss " << sf::format_double(last.loss) << "\n";
    if (config.family == sf::CovFamily::spherical) {
        std::cout << "final_sigma " << sf::format_double(std::exp(last.params[0])) << "\n";
    }
}

// ---------------------------------------------------------------- dilate --

struct DilateArgs {
    std::string in;
    std::string filter;
    int rate = 1;
    double blur_coef = sf::kDefaultBlurCoef;
    bool no_blur = false;
    std::string mode = "zero";
    std::string out;
};

void run_dilate(const DilateArgs& a) {
    const sf::ImagePlane img = sf::read_pgm(a.in);
    const sf::KernelGrid f = sf::read_kernel_csv(a.filter);
    const sf::BoundaryMode mode = sf::parse_boundary_mode(a.mode);

    int blur_reach = 0;
    sf::ImagePlane out = [&] {
        if (a.no_blur) {
            return sf::dilated_conv(img, f, a.rate, mode);
        }
        const double sigma = a.blur_coef * a.rate;
        blur_reach = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
        return sf::blurred_dilated_conv(img, f, a.rate, a.blur_coef, mode);
    }();
    sf::write_pgm(a.out, out);

    const int reach = a.rate * std::max(f.ry(), f.rx()) + blur_reach;
    std::cout << "interior_variance " << sf::format_double(interior_variance(out, reach, reach))
              << "\n";
}

// --------------------------------------------------------------- dynamic --

struct DynamicArgs {
    std::string in;
    std::string field;
    std::string weights;
    std::string out;
};

void run_dynamic(const DynamicArgs& a) {
    const sf::ImagePlane img = sf::read_pgm(a.in);
    const sf::CovField field = sf::read_cov_field(a.field);
    const std::vector<double> w = read_number_list(a.weights);
    if (w.size() != 9) {
        throw sf::ParseError("weights file must hold exactly 9 numbers, got " +
                             std::to_string(w.size()));
    }
    sf::TapWeights weights;
    std::copy(w.begin(), w.end(), weights.w.begin());

    sf::write_pgm(a.out, sf::dynamic_gauss_conv(img, field, weights));
}

// ----------------------------------------------------------------- synth --

struct SynthArgs {
    std::string kind;
    int size = 64;
    std::uint64_t seed = 0;
    int period = 2;
    std::string blur;
    std::string out;
    std::string blurred_out;
};

void run_synth(const SynthArgs& a) {
    sf::ImagePlane img = [&] {
        if (a.kind == "texture") {
            return sf::synth_texture(a.size, a.size, a.seed);
        }
        if (a.kind == "checkerboard") {
            return sf::synth_checkerboard(a.size, a.size, a.period);
        }
        if (a.kind == "bump") {
            return sf::synth_bump(a.size, a.size);
        }
        throw sf::ParseError("unknown synth kind '" + a.kind + "'");
    }();
    sf::write_pgm(a.out, img);

    if (!a.blurred_out.empty()) {
        if (a.blur.empty()) {
            throw sf::ParseError("--blurred-out requires --blur");
        }
        const sf::CovMatrix cov = sf::params_to_matrix(sf::parse_cov_params(a.blur));
        sf::write_pgm(a.blurred_out,
                      sf::conv2d(img, sf::gaussian_kernel(cov), sf::BoundaryMode::zero_pad_same));
    }
}

// ------------------------------------------------------------- gradcheck --

struct GradcheckArgs {
    std::string family = "sph";
    std::uint64_t seed = 7;
    bool corrupt = false;
};

double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

sf::CovParams random_params(sf::CovFamily family, std::mt19937_64& rng, double lo, double hi) {
    std::array<double, 3> p{};
    for (int i = 0; i < sf::param_count(family); ++i) {
        p[static_cast<std::size_t>(i)] = lo + (hi - lo) * unit_double(rng);
    }
    if (family == sf::CovFamily::full) {
        p[1] = 2.0 * unit_double(rng) - 1.0;
    }
    return sf::CovParams(family, std::span<const double>(p.data(),
                                                         static_cast<std::size_t>(sf::param_count(family))));
}

double kernel_path_check(sf::CovFamily family, std::uint64_t seed, bool corrupt) {
    std::mt19937_64 rng(seed);
    const sf::ImagePlane reference = sf::synth_texture(16, 16, seed);
    const sf::CovParams truth = random_params(family, rng, 0.0, 0.6);
    const sf::ImagePlane target =
        sf::conv2d(reference, sf::gaussian_kernel(sf::params_to_matrix(truth)),
                   sf::BoundaryMode::zero_pad_same);

    const sf::CovParams at = random_params(family, rng, -0.5, 0.8);
    const sf::Radius radius = sf::support_radius(sf::params_to_matrix(at));
    const int margin = 4;
    const sf::LossGrad lg = sf::loss_and_grad(reference, target, at, margin, radius);

    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < at.size(); ++i) {
        sf::CovParams plus = at;
        plus[i] += h;
        sf::CovParams minus = at;
        minus[i] -= h;
        const double lp = sf::loss_and_grad(reference, target, plus, margin, radius).loss;
        const double lm = sf::loss_and_grad(reference, target, minus, margin, radius).loss;
        const double fd = (lp - lm) / (2.0 * h);
        double analytic = lg.grad[i];
        if (corrupt) {
            analytic *= 1.01;
        }
        const double rel = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8);
        std::cout << "kernel_path " << sf::family_name(family) << " p" << (i + 1)
                  << " rel_err " << sf::format_double(rel) << "\n";
        worst = std::max(worst, rel);
    }
    return worst;
}

double dynamic_path_check(sf::CovFamily family, std::uint64_t seed, bool corrupt) {
    std::mt19937_64 rng(seed + 1);
    const int n = 12;
    const sf::ImagePlane image = sf::synth_texture(n, n, seed + 1);

    // Field values chosen so every warped tap stays well away from bilinear
    // cell boundaries (the interpolation is not differentiable there).
    sf::CovField field(n, n, family);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            while (true) {
                const sf::CovParams p =
                    random_params(family, rng, std::log(1.15), std::log(1.35));
                bool ok = true;
                for (const sf::Vec2& o : sf::warp_offsets(sf::params_to_matrix(p))) {
                    const double fy = std::abs(o.y - std::round(o.y));
                    const double fx = std::abs(o.x - std::round(o.x));
                    if ((o.y != 0.0 && fy < 1e-2) || (o.x != 0.0 && fx < 1e-2)) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    field.set(y, x, p);
                    break;
                }
            }
        }
    }

    sf::TapWeights weights;
    for (auto& v : weights.w) {
        v = 0.2 + 0.8 * unit_double(rng);
    }
    sf::ImagePlane upstream(n, n);
    for (double& v : upstream.values()) {
        v = 2.0 * unit_double(rng) - 1.0;
    }

    const sf::DynamicGrads grads = sf::dynamic_gauss_conv_backward(image, field, weights, upstream);

    auto objective = [&](const sf::CovField& f) {
        const sf::ImagePlane out = sf::dynamic_gauss_conv(image, f, weights);
        double s = 0.0;
        for (int y = 0; y < n; ++y) {
            for (int x = 0; x < n; ++x) {
                s += upstream.at(y, x) * out.at(y, x);
            }
        }
        return s;
    };

    const double h = 1e-5;
    double worst = 0.0;
    const int d = field.param_count();
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            for (int j = 0; j < d; ++j) {
                sf::CovField probe = field;
                probe.param(y, x, j) += h;
                const double lp = objective(probe);
                probe.param(y, x, j) -= 2.0 * h;
                const double lm = objective(probe);
                const double fd = (lp - lm) / (2.0 * h);
                double analytic =
                    grads.field[(static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x)) *
                                    static_cast<std::size_t>(d) +
                                static_cast<std::size_t>(j)];
                if (corrupt) {
                    analytic *= 1.01;
                }
                const double rel = std::abs(analytic - fd) / std::max(std::abs(fd), 1e-8);
                worst = std::max(worst, rel);
            }
        }
    }
    std::cout << "dynamic_path " << sf::family_name(family) << " worst_field rel_err "
              << sf::format_double(worst) << "\n";
    return worst;
}

void run_gradcheck(const GradcheckArgs& a) {
    const sf::CovFamily family = sf::parse_family(a.family);
    const double worst = std::max(kernel_path_check(family, a.seed, a.corrupt),
                                  dynamic_path_check(family, a.seed, a.corrupt));
    std::cout << "worst rel_err " << sf::format_double(worst) << "\n";
    constexpr double kTol = 1e-4;
    if (!(worst <= kTol)) {
        throw GradcheckFailure("gradient check failed: worst relative error " +
                               sf::format_double(worst) + " exceeds " + sf::format_double(kTol));
    }
}

// ----------------------------------------------------------------- bench --

struct BenchArgs {
    std::vector<int> sizes = {64, 128, 256};
    int reps = 5;
};

template <typename Fn>
double median_ms(int reps, Fn&& fn) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

void run_bench(const BenchArgs& a) {
    std::cout << "operation,size,median_ms\n";
    const sf::CovMatrix cov{4.0, 4.0, 0.0};
    for (int size : a.sizes) {
        const sf::ImagePlane img = sf::synth_texture(size, size, 1);

        const sf::KernelGrid g = sf::gaussian_kernel(cov);
        std::cout << "conv2d_dense," << size << ","
                  << sf::format_double(median_ms(a.reps, [&] {
                         volatile double sink = sf::conv2d(img, g, sf::BoundaryMode::zero_pad_same).at(0, 0);
                         (void)sink;
                     }))
                  << "\n";

        const sf::SeparablePair sep = sf::separable_1d(cov);
        std::cout << "conv2d_separable," << size << ","
                  << sf::format_double(median_ms(a.reps, [&] {
                         volatile double sink =
                             sf::separable_conv(img, sep.ky, sep.kx, sf::BoundaryMode::zero_pad_same).at(0, 0);
                         (void)sink;
                     }))
                  << "\n";

        const sf::CovField field = sf::CovField::constant(size, size, sf::CovParams::spherical(0.3));
        const sf::TapWeights weights = sf::TapWeights::averaging();
        std::cout << "dynamic_gauss_conv," << size << ","
                  << sf::format_double(median_ms(a.reps, [&] {
                         volatile double sink = sf::dynamic_gauss_conv(img, field, weights).at(0, 0);
                         (void)sink;
                     }))
                  << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structured Gaussian filtering: log-Cholesky covariances, composed and "
                 "anti-aliased filters, blur recovery, dynamic covariance-warped sampling"};
    app.require_subcommand(1);

    KernelArgs kernel_args;
    CLI::App* kernel_cmd = app.add_subcommand("kernel", "Render a Gaussian or DoG kernel to CSV");
    kernel_cmd->add_option("--cov", kernel_args.cov, "covariance spec, e.g. sph:0 or full:0,-2,0.693");
    kernel_cmd->add_option("--dog", kernel_args.dog, "center and surround specs")->expected(2);
    kernel_cmd->add_option("--radius", kernel_args.radius, "override support radius as ry,rx");
    kernel_cmd->add_option("--out", kernel_args.out, "output CSV path")->required();
    kernel_cmd->callback([&] {
        if (kernel_args.cov.empty() == kernel_args.dog.empty()) {
            throw CLI::ValidationError("kernel", "exactly one of --cov or --dog is required");
        }
        run_kernel(kernel_args);
    });

    BlurArgs blur_args;
    CLI::App* blur_cmd = app.add_subcommand("blur", "Gaussian-blur a PGM image");
    blur_cmd->add_option("--in", blur_args.in, "input PGM")->required();
    blur_cmd->add_option("--cov", blur_args.cov, "covariance spec")->required();
    blur_cmd->add_option("--mode", blur_args.mode, "boundary mode: zero|reflect|valid");
    blur_cmd->add_option("--out", blur_args.out, "output PGM")->required();
    blur_cmd->callback([&] { run_blur(blur_args); });

    RecoverArgs recover_args;
    CLI::App* recover_cmd =
        app.add_subcommand("recover", "Recover the Gaussian blur between two images");
    recover_cmd->add_option("--reference", recover_args.reference, "sharp PGM")->required();
    recover_cmd->add_option("--blurred", recover_args.blurred, "blurred PGM")->required();
    recover_cmd->add_option("--family", recover_args.family, "sph|diag|full");
    recover_cmd->add_option("--init", recover_args.init, "initial covariance spec");
    recover_cmd->add_option("--lr", recover_args.lr, "learning rate");
    recover_cmd->add_option("--momentum", recover_args.momentum, "momentum in [0,1)");
    recover_cmd->add_option("--steps", recover_args.steps, "iteration count");
    recover_cmd->add_option("--margin", recover_args.margin, "loss interior margin, pixels");
    recover_cmd->add_option("--trace", recover_args.trace, "trajectory CSV path");
    recover_cmd->callback([&] { run_recover(recover_args); });

    DilateArgs dilate_args;
    CLI::App* dilate_cmd =
        app.add_subcommand("dilate", "Dilated filtering with optional anti-aliasing blur");
    dilate_cmd->add_option("--in", dilate_args.in, "input PGM")->required();
    dilate_cmd->add_option("--filter", dilate_args.filter, "free-form kernel CSV")->required();
    dilate_cmd->add_option("--rate", dilate_args.rate, "dilation rate")->required();
    dilate_cmd->add_option("--blur-coef", dilate_args.blur_coef, "sigma = blur_coef * rate");
    dilate_cmd->add_flag("--no-blur", dilate_args.no_blur, "plain dilation without smoothing");
    dilate_cmd->add_option("--mode", dilate_args.mode, "boundary mode");
    dilate_cmd->add_option("--out", dilate_args.out, "output PGM")->required();
    dilate_cmd->callback([&] { run_dilate(dilate_args); });

    DynamicArgs dynamic_args;
    CLI::App* dynamic_cmd =
        app.add_subcommand("dynamic", "Covariance-warped 9-tap dynamic filtering");
    dynamic_cmd->add_option("--in", dynamic_args.in, "input PGM")->required();
    dynamic_cmd->add_option("--field", dynamic_args.field, "covariance field tensor (.gft)")->required();
    dynamic_cmd->add_option("--weights", dynamic_args.weights, "CSV with 9 tap weights")->required();
    dynamic_cmd->add_option("--out", dynamic_args.out, "output PGM")->required();
    dynamic_cmd->callback([&] { run_dynamic(dynamic_args); });

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate test images");
    synth_cmd->add_option("--kind", synth_args.kind, "texture|checkerboard|bump")->required();
    synth_cmd->add_option("--size", synth_args.size, "image side length");
    synth_cmd->add_option("--seed", synth_args.seed, "texture seed");
    synth_cmd->add_option("--period", synth_args.period, "checkerboard period");
    synth_cmd->add_option("--blur", synth_args.blur, "also write a blurred copy with this covariance");
    synth_cmd->add_option("--out", synth_args.out, "output PGM")->required();
    synth_cmd->add_option("--blurred-out", synth_args.blurred_out, "path for the blurred copy");
    synth_cmd->callback([&] { run_synth(synth_args); });

    GradcheckArgs gradcheck_args;
    CLI::App* gradcheck_cmd =
        app.add_subcommand("gradcheck", "Finite-difference check of the analytic gradients");
    gradcheck_cmd->add_option("--family", gradcheck_args.family, "sph|diag|full");
    gradcheck_cmd->add_option("--seed", gradcheck_args.seed, "random seed");
    gradcheck_cmd->add_flag("--corrupt", gradcheck_args.corrupt,
                            "perturb the analytic gradient to prove the check can fail");
    gradcheck_cmd->callback([&] { run_gradcheck(gradcheck_args); });

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Timing table for the core operations");
    bench_cmd->add_option("--sizes", bench_args.sizes, "image sizes to time");
    bench_cmd->add_option("--reps", bench_args.reps, "repetitions per timing (>= 3)")
        ->check(CLI::Range(3, 1 << 20));
    bench_cmd->callback([&] { run_bench(bench_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const sf::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
