#include "doctest.h"

#include <cmath>

#include "sigmafilt/kernel.hpp"
#include "test_util.hpp"

using namespace sigmafilt;

TEST_SUITE_BEGIN("kernel");

TEST_CASE("support_radius follows ceil(2 sigma) with a minimum of 1") {
    CHECK(support_radius({1.0, 1.0, 0.0}) == Radius{2, 2});
    CHECK(support_radius({6.25, 1.0, 0.0}) == Radius{5, 2});
    CHECK(support_radius({0.0025, 0.0025, 0.0}) == Radius{1, 1});
    // worked full-covariance example: radii from the marginal variances
    CHECK(support_radius({1.0, 8.0, -2.0}) == Radius{2, 6});
    CHECK_THROWS_AS(support_radius({0.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("gaussian_kernel matches a direct evaluation oracle for the identity") {
    const KernelGrid k = gaussian_kernel({1.0, 1.0, 0.0});
    REQUIRE(k.ry() == 2);
    REQUIRE(k.rx() == 2);
    CHECK(k.kind() == KernelKind::gaussian);
    CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> oracle = testutil::oracle_gaussian_grid(1.0, 1.0, 0.0, 2, 2);
    int i = 0;
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx, ++i) {
            CHECK(k.at(dy, dx) == doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-14));
        }
    }
    // center value frozen from the oracle
    CHECK(k.at(0, 0) == doctest::Approx(0.16210282163712664).epsilon(1e-12));
}

TEST_CASE("gaussian_kernel recovers the delta as sigma -> 0") {
    const double s = 0.05 * 0.05;
    const KernelGrid k = gaussian_kernel({s, s, 0.0});
    REQUIRE(k.ry() == 1);
    REQUIRE(k.rx() == 1);
    CHECK(k.at(0, 0) >= 1.0 - 1e-10);
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dy != 0 || dx != 0) {
                CHECK(k.at(dy, dx) <= 1e-10);
            }
        }
    }
}

TEST_CASE("gaussian_kernel recovers average pooling as sigma -> infinity") {
    const double s = 1000.0 * 1000.0;
    const KernelGrid k = gaussian_kernel({s, s, 0.0}, Radius{2, 2});
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            CHECK(std::abs(k.at(dy, dx) - 0.04) < 1e-4);
        }
    }
}

TEST_CASE("gaussian grids are symmetric under point reflection") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const auto family = static_cast<CovFamily>(trial % 3);
        const KernelGrid k =
            gaussian_kernel(params_to_matrix(testutil::random_params(family, rng, -1.0, 1.2)));
        for (int dy = -k.ry(); dy <= k.ry(); ++dy) {
            for (int dx = -k.rx(); dx <= k.rx(); ++dx) {
                CHECK(k.at(dy, dx) == k.at(-dy, -dx));
            }
        }
        for (double c : k.coeffs()) {
            CHECK(c > 0.0);
        }
        CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gaussian_kernel rejects non-SPD covariance") {
    CHECK_THROWS_AS(gaussian_kernel({1.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(gaussian_kernel({1.0, 1.0, 0.0}, Radius{0, 2}), ShapeError);
}

TEST_CASE("gaussian_kernel_with_grads matches finite differences with pinned radius") {
    std::mt19937_64 rng(47);
    const double h = 1e-6;
    for (CovFamily family : {CovFamily::spherical, CovFamily::diagonal, CovFamily::full}) {
        for (int trial = 0; trial < 100; ++trial) {
            CovParams p = testutil::random_params(family, rng, -0.5, 1.0);
            if (trial == 0 && family == CovFamily::full) {
                p = CovParams::full(0.0, -2.0, std::log(2.0));
            }
            if (trial == 1 && family == CovFamily::spherical) {
                p = CovParams::spherical(0.0);
            }
            const Radius radius = support_radius(params_to_matrix(p));
            const KernelWithGrads kg = gaussian_kernel_with_grads(p, radius);
            REQUIRE(kg.grads.size() == static_cast<std::size_t>(p.size()));

            for (int i = 0; i < p.size(); ++i) {
                // gradient grids sum to zero (derivative of a unit sum)
                CHECK(std::abs(kg.grads[static_cast<std::size_t>(i)].sum()) < 1e-10);

                CovParams plus = p;
                plus[i] += h;
                CovParams minus = p;
                minus[i] -= h;
                const KernelGrid kp = gaussian_kernel(params_to_matrix(plus), radius);
                const KernelGrid km = gaussian_kernel(params_to_matrix(minus), radius);
                for (int dy = -radius.ry; dy <= radius.ry; ++dy) {
                    for (int dx = -radius.rx; dx <= radius.rx; ++dx) {
                        const double fd = (kp.at(dy, dx) - km.at(dy, dx)) / (2.0 * h);
                        CHECK(std::abs(kg.grads[static_cast<std::size_t>(i)].at(dy, dx) - fd) <
                              1e-8);
                    }
                }
            }
        }
    }
}

TEST_CASE("separable_1d factors reproduce the dense grid") {
    const SeparablePair id = separable_1d({1.0, 1.0, 0.0});
    CHECK(id.ky.taps.size() == 5);
    CHECK(id.kx.taps.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(id.ky.taps[i] == id.kx.taps[i]);
    }

    const SeparablePair aniso = separable_1d({4.0, 1.0, 0.0});
    CHECK(aniso.ky.taps.size() == 9);
    CHECK(aniso.kx.taps.size() == 5);

    CHECK_THROWS_AS(separable_1d({1.0, 1.0, 0.5}), DomainError);

    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        const CovMatrix cov =
            params_to_matrix(testutil::random_params(CovFamily::diagonal, rng, -1.0, 1.2));
        const SeparablePair sep = separable_1d(cov);
        const KernelGrid dense = gaussian_kernel(cov);
        double sy = 0.0;
        double sx = 0.0;
        for (double t : sep.ky.taps) {
            sy += t;
        }
        for (double t : sep.kx.taps) {
            sx += t;
        }
        CHECK(sy == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sx == doctest::Approx(1.0).epsilon(1e-12));
        for (int dy = -dense.ry(); dy <= dense.ry(); ++dy) {
            for (int dx = -dense.rx(); dx <= dense.rx(); ++dx) {
                const double outer = sep.ky.taps[static_cast<std::size_t>(dy + sep.ky.r)] *
                                     sep.kx.taps[static_cast<std::size_t>(dx + sep.kx.r)];
                CHECK(std::abs(dense.at(dy, dx) - outer) < 1e-12);
            }
        }
    }
}

TEST_CASE("dog_kernel is a zero-sum center-surround difference") {
    const CovMatrix one{1.0, 1.0, 0.0};
    const CovMatrix four{4.0, 4.0, 0.0};

    const KernelGrid zero = dog_kernel(one, one);
    for (double c : zero.coeffs()) {
        CHECK(c == 0.0);
    }

    const KernelGrid dog = dog_kernel(one, four);
    CHECK(dog.kind() == KernelKind::dog);
    CHECK(dog.ry() == support_radius(four).ry);
    CHECK(std::abs(dog.sum()) < 1e-12);
    CHECK(dog.at(0, 0) > 0.0);
    CHECK(dog.at(-dog.ry(), -dog.rx()) < 0.0);
    CHECK(dog.at(dog.ry(), dog.rx()) < 0.0);

    CHECK_THROWS_AS(dog_kernel(four, one), DomainError);
}

TEST_CASE("dog_kernel sums to zero for 100 random valid pairs") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const CovMatrix center =
            params_to_matrix(testutil::random_params(CovFamily::full, rng, -0.5, 0.8));
        const double grow = 1.0 + 2.0 * testutil::unit_double(rng);
        const CovMatrix surround{center.syy * grow, center.sxx * grow, center.sxy};
        const KernelGrid dog = dog_kernel(center, surround);
        CHECK(std::abs(dog.sum()) < 1e-12);
    }
}

TEST_CASE("compose_kernels behaves like discrete convolution") {
    const KernelGrid g = gaussian_kernel({1.0, 1.0, 0.0});

    SUBCASE("delta is the identity") {
        const KernelGrid composed = compose_kernels(g, KernelGrid::delta());
        CHECK(composed.ry() == g.ry());
        CHECK(composed.rx() == g.rx());
        CHECK(composed.kind() == KernelKind::composed);
        for (int dy = -g.ry(); dy <= g.ry(); ++dy) {
            for (int dx = -g.rx(); dx <= g.rx(); ++dx) {
                CHECK(composed.at(dy, dx) == g.at(dy, dx));
            }
        }
    }

    SUBCASE("zero filter wipes the output") {
        const KernelGrid zeros(1, 1, KernelKind::freeform);
        const KernelGrid composed = compose_kernels(g, zeros);
        CHECK(composed.ry() == g.ry() + 1);
        for (double c : composed.coeffs()) {
            CHECK(c == 0.0);
        }
    }

    SUBCASE("composition is linear in the second argument") {
        std::mt19937_64 rng(61);
        std::vector<double> fa(9);
        std::vector<double> fb(9);
        for (std::size_t i = 0; i < 9; ++i) {
            fa[i] = testutil::unit_double(rng) - 0.5;
            fb[i] = testutil::unit_double(rng) - 0.5;
        }
        std::vector<double> fsum(9);
        for (std::size_t i = 0; i < 9; ++i) {
            fsum[i] = 2.0 * fa[i] + 3.0 * fb[i];
        }
        const KernelGrid ca = compose_kernels(g, KernelGrid::freeform(1, 1, fa));
        const KernelGrid cb = compose_kernels(g, KernelGrid::freeform(1, 1, fb));
        const KernelGrid cs = compose_kernels(g, KernelGrid::freeform(1, 1, fsum));
        for (int dy = -cs.ry(); dy <= cs.ry(); ++dy) {
            for (int dx = -cs.rx(); dx <= cs.rx(); ++dx) {
                CHECK(cs.at(dy, dx) ==
                      doctest::Approx(2.0 * ca.at(dy, dx) + 3.0 * cb.at(dy, dx)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("cascade smoothing: composing Gaussians approximates the summed covariance") {
    // The +-2 sigma support truncates about 4.6% of the mass per axis, and
    // renormalization folds it back in, so the self-composition differs from
    // the directly rendered summed-covariance Gaussian by a few 1e-3 at
    // sigma = 1. Measured 2.784e-3; kept as a regression bound.
    const CovMatrix one{1.0, 1.0, 0.0};
    const KernelGrid g = gaussian_kernel(one);
    const KernelGrid composed = compose_kernels(g, g);
    const KernelGrid direct =
        gaussian_kernel(cascade_add(one, one), Radius{composed.ry(), composed.rx()});
    double linf = 0.0;
    for (int dy = -composed.ry(); dy <= composed.ry(); ++dy) {
        for (int dx = -composed.rx(); dx <= composed.rx(); ++dx) {
            linf = std::max(linf, std::abs(composed.at(dy, dx) - direct.at(dy, dx)));
        }
    }
    CHECK(linf < 3.5e-3);
    CHECK(linf > 1e-3); // the truncation error is real; see the sigma sweep below

    // larger sigma shrinks the absolute error with the kernel magnitude
    const CovMatrix big{2.25, 2.25, 0.0};
    const KernelGrid gb = gaussian_kernel(big);
    const KernelGrid composed_b = compose_kernels(gb, gb);
    const KernelGrid direct_b =
        gaussian_kernel(cascade_add(big, big), Radius{composed_b.ry(), composed_b.rx()});
    double linf_b = 0.0;
    for (int dy = -composed_b.ry(); dy <= composed_b.ry(); ++dy) {
        for (int dx = -composed_b.rx(); dx <= composed_b.rx(); ++dx) {
            linf_b = std::max(linf_b, std::abs(composed_b.at(dy, dx) - direct_b.at(dy, dx)));
        }
    }
    CHECK(linf_b < 1e-3);
}

TEST_SUITE_END();
