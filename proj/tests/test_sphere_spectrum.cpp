#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "spinlab/sphere_spectrum.hpp"

using namespace spinlab;

namespace {

long long choose(int n, int k) {
    // Pascal triangle, independent of the rational code path
    std::vector<std::vector<long long>> t(n + 1, std::vector<long long>(n + 1, 0));
    for (int i = 0; i <= n; ++i) {
        t[i][0] = 1;
        for (int j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + (j <= i - 1 ? t[i - 1][j] : 0);
    }
    return t[n][k];
}

// Number of monomials of degree k in d variables, by enumeration.
long long monomials(int d, int k) {
    if (k < 0) return 0;
    long long count = 0;
    std::vector<int> e(d, 0);
    std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == d - 1) {
            ++count;
            return;
        }
        for (int a = 0; a <= left; ++a) rec(i + 1, left - a);
    };
    rec(0, k);
    return count;
}

RVec random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    RVec x(d);
    for (int i = 0; i < d; ++i) x(i) = g(rng);
    return x.normalized();
}

}  // namespace

TEST_CASE("Dirac and Laplace tables") {
    for (int n : {2, 3, 4}) {
        auto dirac = sphere_dirac_spectrum(n, 5);
        REQUIRE(dirac.size() == 6);
        for (int m = 0; m <= 5; ++m) {
            CHECK(dirac[m].m == m);
            CHECK(dirac[m].twice_abs_lambda == n + 2 * m);
            CHECK(dirac[m].multiplicity == (1LL << (n / 2)) * choose(m + n - 1, m));
        }
        auto lap = sphere_laplace_spectrum(n, 5);
        for (int k = 0; k <= 5; ++k) {
            CHECK(lap[k].eigenvalue == static_cast<long long>(k) * (k + n - 1));
            CHECK(lap[k].multiplicity == monomials(n + 1, k) - monomials(n + 1, k - 2));
        }
    }
    auto d3 = sphere_dirac_spectrum(3, 1);
    CHECK(d3[0].abs_lambda() == 1.5);
    CHECK(d3[0].multiplicity == 2);
    CHECK(d3[1].abs_lambda() == 2.5);
    CHECK(d3[1].multiplicity == 6);
    CHECK(sphere_dirac_spectrum(2, 1)[1].multiplicity == 4);
    CHECK(sphere_laplace_spectrum(2, 1)[1].eigenvalue == 2);
    CHECK(sphere_laplace_spectrum(2, 1)[1].multiplicity == 3);
    CHECK(sphere_laplace_spectrum(3, 2)[2].eigenvalue == 8);
    CHECK(sphere_laplace_spectrum(3, 2)[2].multiplicity == 9);
    CHECK(sphere_laplace_spectrum(2, 0)[0].multiplicity == 1);
    CHECK_THROWS_AS(sphere_dirac_spectrum(0, 3), Error);
}

TEST_CASE("polynomials and harmonic projection") {
    auto p = parse_polynomial("x1*x2*x3", 4);
    CHECK(p.dim == 4);
    CHECK(p.degree() == 3);
    auto h = harmonic_project(p);
    CHECK((h.p - p).is_zero());

    auto q = harmonic_project(parse_polynomial("x1^2", 4));
    auto want = parse_polynomial("3/4*x1^2 - 1/4*x2^2 - 1/4*x3^2 - 1/4*x4^2", 4);
    CHECK((q.p - want).is_zero());
    CHECK(q.p.laplacian().is_zero());

    for (int m = 0; m <= 4; ++m) {
        auto r = real_power_x1_ix2(4, m + 1);
        CHECK(r.laplacian().is_zero());
        CHECK((harmonic_project(r).p - r).is_zero());
    }
    auto c = parse_polynomial("x1^2*x2 - 0.5*x2^3 + 2/3*x3", 3);
    RVec x(3);
    x << 0.3, -1.1, 2.0;
    CHECK(c.eval(x) == doctest::Approx(0.09 * -1.1 - 0.5 * std::pow(-1.1, 3) + 2.0 / 3.0 * 2.0));
    RVec g = c.gradient(x);
    CHECK(g(0) == doctest::Approx(2 * 0.3 * -1.1));
    CHECK(g(1) == doctest::Approx(0.09 - 1.5 * 1.21));
    CHECK(g(2) == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(parse_polynomial("x1**2"), Error);
    CHECK_THROWS_AS(parse_polynomial("y1"), Error);
    CHECK_THROWS_AS(parse_polynomial("x5", 3), Error);
    CHECK_THROWS_AS(make_harmonic(parse_polynomial("x1^2", 3)), Error);
    CHECK_THROWS_AS(harmonic_project(parse_polynomial("x1^2 + x2", 3)), Error);
}

TEST_CASE("sphere eigenspinors") {
    std::mt19937_64 rng(5);
    // k = 0, (eps, mu) = (+, -): (n - 1) phi_{-1, j}
    for (int n : {2, 3}) {
        auto one = make_harmonic(parse_polynomial("1", n + 1));
        auto spec = make_sphere_spec(one, 1, -1, 1);
        CHECK(spec.coefficient() == doctest::Approx(n - 1));
        for (int t = 0; t < 5; ++t) {
            RVec x = random_unit(rng, n + 1);
            CVec want = (n - 1.0) * clifford_apply(spec.ambient_rep, x, spec.constant_spinors[0]);
            CHECK((sphere_eigenspinor_eval(spec, x) - want).norm() < 1e-13);
        }
    }

    auto f = make_harmonic(parse_polynomial("x1*x2*x3", 4));
    for (int eps : {1, -1})
        for (int mu : {1, -1}) {
            auto spec = make_sphere_spec(f, eps, mu, 1);
            RVec e4 = RVec::Unit(4, 3);
            CHECK(sphere_eigenspinor_eval(spec, e4).norm() < 1e-15);
            CHECK(spec.eigenvalue() == doctest::Approx(eps * (3 + 1.0) - 0.5 * mu));
            for (int t = 0; t < 10; ++t) {
                RVec x = random_unit(rng, 4);
                double a2 = spec.constant_spinors[0].squaredNorm();
                double want = (std::pow(spec.coefficient() * f.p.eval(x), 2) + sphere_gradient(f, x).squaredNorm()) * a2;
                CHECK(sphere_eigenspinor_eval(spec, x).squaredNorm() == doctest::Approx(want).epsilon(1e-12));
            }
        }

    for (int m = 1; m <= 3; ++m) {
        auto r = make_harmonic(real_power_x1_ix2(4, m + 1));
        auto spec = make_sphere_spec(r, -1, -1, 1);
        CHECK(sphere_eigenspinor_eval(spec, RVec::Unit(4, 3)).norm() < 1e-15);
        RVec y(4);
        y << 0, 0, 0.6, 0.8;
        CHECK(sphere_eigenspinor_eval(spec, y).norm() < 1e-15);
    }

    auto amb = build_clifford_rep(4);
    auto sp = ambient_constant_spinors(amb);
    CHECK(sp.size() == 2);
    auto amb3 = build_clifford_rep(3);
    CHECK(ambient_constant_spinors(amb3).size() == 2);
}

TEST_CASE("sphere zero scan") {
    auto lin = make_harmonic(parse_polynomial("x1", 4));
    auto none = sphere_zero_scan(lin, 500);
    CHECK(none.zeros.empty());

    auto f = make_harmonic(parse_polynomial("x1*x2*x3", 4));
    auto scan = sphere_zero_scan(f, 3000);
    CHECK(scan.num_clusters == 3);
    CHECK(scan.converged > 2900);
    std::vector<std::array<int, 3>> hits(scan.num_clusters, {0, 0, 0});
    for (const auto& z : scan.zeros) {
        CHECK(std::abs(z.x.norm() - 1.0) < 1e-12);
        RVec a = z.x.head(3).cwiseAbs();
        std::sort(a.data(), a.data() + 3);
        CHECK(std::hypot(a(0), a(1)) < 1e-8);
        if (z.cluster < 0) continue;
        int big = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(z.x(i)) > std::abs(z.x(big))) big = i;
        if (std::abs(z.x(big)) > 1e-3) hits[z.cluster][big]++;
    }
    // each cluster lies on exactly one circle
    for (const auto& h : hits) CHECK(std::count(h.begin(), h.end(), 0) == 2);

    auto s1 = sphere_samples(4, 100, 3), s2 = sphere_samples(4, 100, 3);
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK((s1[i] - s2[i]).norm() == 0.0);
}
