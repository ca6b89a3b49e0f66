#include <doctest.h>

#include <cmath>

#include "spinlab/bessel.hpp"
#include "spinlab/green.hpp"
#include "spinlab/torus_spectrum.hpp"

using namespace spinlab;

TEST_CASE("Bessel functions") {
    for (double z : {0.01, 0.3, 1.0, 2.5, 7.0, 11.9, 15.9, 16.1, 20.0, 55.0}) {
        for (int nu : {0, 1}) {
            CHECK(std::abs(bessel_j(nu, z) - std::cyl_bessel_j(nu, z)) <= 1e-13 * std::max(1.0, std::abs(std::cyl_neumann(nu, z))));
            CHECK(std::abs(bessel_y(nu, z) - std::cyl_neumann(nu, z)) <= 1e-13 * std::max(1.0, std::abs(std::cyl_neumann(nu, z))));
        }
        CHECK(bessel_y_half(z) == doctest::Approx(std::cyl_neumann(0.5, z)).epsilon(1e-12).scale(1e-12));
        CHECK(bessel_y_three_halves(z) == doctest::Approx(std::cyl_neumann(1.5, z)).epsilon(1e-12).scale(1e-12));
    }
    for (int nu : {0, 1}) {
        double lo = kBesselSeriesLimit, hi = std::nextafter(kBesselSeriesLimit, 100.0);
        CHECK(std::abs(bessel_j(nu, lo) - bessel_j(nu, hi)) < 1e-13);
        CHECK(std::abs(bessel_y(nu, lo) - bessel_y(nu, hi)) < 1e-13);
    }
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-14);
}

TEST_CASE("radial profile closed forms") {
    double lam = 1.3;
    auto p3 = green_profile(3, lam);
    CHECK(p3.omega_nm1 == doctest::Approx(4 * kPi));
    auto p2 = green_profile(2, lam);
    CHECK(p2.omega_nm1 == doctest::Approx(2 * kPi));
    for (double r : {0.05, 0.4, 1.0, 3.7}) {
        CHECK(p3.g(r) == doctest::Approx(std::cos(lam * r) / (4 * kPi * r)).epsilon(1e-14));
        // g = sqrt(pi r / 2) Y_{1/2}(lambda r) lambda^{1/2} / (-4 pi r) in the half-order form
        double half = -std::sqrt(kPi * lam / (2 * r)) * std::cyl_neumann(0.5, lam * r) / (4 * kPi);
        CHECK(p3.g(r) == doctest::Approx(half).epsilon(1e-12));
        double c = (std::log(lam) - std::log(2.0) + kEulerGamma) / (2 * kPi);
        CHECK(p2.g(r) == doctest::Approx(-0.25 * std::cyl_neumann(0, lam * r) + c * std::cyl_bessel_j(0, lam * r)).epsilon(1e-12));
        for (const auto& p : {p2, p3}) {
            double h = 1e-5 * r;
            CHECK(p.g_prime(r) == doctest::Approx((p.g(r + h) - p.g(r - h)) / (2 * h)).epsilon(1e-7));
            CHECK(p.g_second(r) == doctest::Approx((p.g_prime(r + h) - p.g_prime(r - h)) / (2 * h)).epsilon(1e-7));
            CHECK(std::abs(p.ode_residual(r)) < 1e-10 * std::max(1.0, std::abs(p.g_second(r))));
        }
    }
    // singular behaviour: g ~ -log r / (2 pi) and 1 / (4 pi r)
    double r = 1e-7;
    CHECK(p2.g(r) + std::log(r) / (2 * kPi) == doctest::Approx(0.0).scale(1e-6));
    CHECK(p3.g(r) * 4 * kPi * r == doctest::Approx(1.0).epsilon(1e-12));
    auto p0 = green_profile(2, 0.0);
    CHECK(p0.g(0.3) == doctest::Approx(-std::log(0.3) / (2 * kPi)));
    CHECK_THROWS_AS(green_profile(4, 1.0), Error);
}

TEST_CASE("Green residual away from the pole") {
    CVec g2(2), g3(2);
    g2 << cplx(0.6, 0.2), cplx(-0.1, 0.7);
    g3 << cplx(1.0, 0.0), cplx(0.0, -0.5);
    for (double lam : {0.0, 0.7, 2.0}) {
        for (int n : {2, 3}) {
            const CVec& g = n == 2 ? g2 : g3;
            for (double s : {0.1, 0.9, 2.3}) {
                RVec x = RVec::LinSpaced(n, 0.3, 1.0).normalized() * s;
                CVec res = green_residual(n, lam, x, g);
                auto ev = euclidean_green_eval(n, lam, x, g);
                CHECK(res.norm() <= 1e-8 * std::max(1.0, ev.value.norm()));
                CHECK((ev.singular_leading + ev.remainder - ev.value).norm() < 1e-12 * ev.value.norm());
            }
        }
    }
}

TEST_CASE("distributional identity against a bump") {
    CVec g2(2), g3(2);
    g2 << cplx(0.6, 0.2), cplx(-0.1, 0.7);
    g3 << cplx(1.0, 0.0), cplx(0.0, 0.0);
    auto r3 = green_verify(3, 1.5, default_bump(3), g3);
    CHECK(r3.integral_error <= 1e-4);
    CHECK(r3.max_residual <= 1e-8);
    auto r2 = green_verify(2, 0.7, default_bump(2), g2);
    CHECK(r2.integral_error <= 1e-4);
    auto z = green_verify(3, 1.5, zero_bump(3), g3);
    CHECK(std::abs(z.extrapolated) < 1e-14);
    CHECK(std::abs(z.target) == 0.0);
}

TEST_CASE("radial preimages") {
    for (int n : {2, 3}) {
        for (double k : {-1.5, -1.0, 0.0, 1.0, 2.5}) {
            CHECK(radial_preimage_check(n, k, 1) <= 1e-10);
            if (k != -2.0) CHECK(radial_preimage_check(n, k, 3) <= 1e-10);
        }
        CHECK(radial_preimage_check(n, 0.0, 2) <= 1e-10);
        CHECK(radial_preimage_check(n, 0.0, 4) <= 1e-10);
        CHECK_THROWS_AS(radial_preimage_check(n, -static_cast<double>(n), 1), Error);
    }
    CHECK_THROWS_AS(radial_preimage_check(3, -2.0, 3), Error);
    CHECK_THROWS_AS(radial_preimage_check(3, 1.0, 5), Error);
}

TEST_CASE("logarithmic coefficient in two dimensions") {
    CHECK(std::abs(fit_log_coefficient(0.0)) < 1e-12);
    for (double lam : {0.7, 1.9, -1.2}) CHECK(fit_log_coefficient(lam) == doctest::Approx(-lam / (2 * kPi)).epsilon(1e-4));
}

TEST_CASE("torus Green kernel") {
    auto z3 = cubic_lattice(3);
    auto d = make_delta(z3, {1, 1, 1});
    CVec g(2);
    g << cplx(1.0, 0.0), cplx(0.0, 0.0);
    RVec x(3);
    x << 0.3, 0.1, 0.2;
    CVec img = torus_green(z3, d, x, g, TorusGreenMethod::ImageSum, 60.0);
    CVec heat = torus_green(z3, d, x, g, TorusGreenMethod::HeatSpectralSum, 20.0);
    CHECK((img - heat).norm() <= 1e-5);
    CVec img2 = torus_green(z3, d, x, g, TorusGreenMethod::ImageSum, 40.0);
    CHECK((img - img2).norm() <= 1e-4);
    // odd kernel: G(-x) = -G(x)
    CVec neg = torus_green(z3, d, -x, g, TorusGreenMethod::ImageSum, 60.0);
    CHECK((img + neg).norm() <= 1e-10);
    CHECK_THROWS_AS(torus_green(z3, d, RVec::Zero(3), g, TorusGreenMethod::ImageSum, 20.0), Error);
    CHECK_THROWS_AS(torus_green(z3, make_delta(z3, {0, 0, 0}), x, g, TorusGreenMethod::ImageSum, 20.0), Error);

    // each spectral coefficient inverts the symbol
    auto rep = build_clifford_rep(3);
    for (const auto& [a, c] : spectral_green_coefficients(z3, d, g, 3.0)) {
        RVec v = shifted_frequency(z3, d, a);
        CHECK((dirac_symbol(rep, v) * c - g / z3.covolume).norm() < 1e-14);
    }
}

TEST_CASE("mass endomorphism vanishes on the cubic torus") {
    auto z3 = cubic_lattice(3);
    for (IntVec bits : {IntVec{1, 1, 1}, IntVec{1, 0, 0}}) {
        auto d = make_delta(z3, bits);
        auto m = mass_endomorphism_torus(z3, d, 12.0);
        CHECK(m.matrix.norm() <= 1e-12);
        CHECK(m.points > 0);
        for (const auto& s : m.trace) CHECK(s.partial_norm <= 1e-12);
        CHECK(half_shell_sum(z3, d, 1).norm() >= 1e-3);
    }
}
