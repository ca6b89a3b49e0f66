#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinlab/lattice.hpp"

using namespace spinlab;

namespace {

// Exhaustive integer box scan with an independently computed box size.
std::vector<IntVec> brute_dual(const Lattice& lat, const IntVec& bits, double R, int box) {
    std::vector<IntVec> out;
    int n = lat.n;
    IntVec a(n, -box);
    while (true) {
        RVec v = RVec::Zero(n);
        for (int j = 0; j < n; ++j) v += (a[j] + 0.5 * bits[j]) * lat.dual_basis.col(j);
        if (v.norm() <= R * (1 + 1e-13)) out.push_back(a);
        int j = 0;
        while (j < n && ++a[j] > box) a[j++] = -box;
        if (j == n) break;
    }
    return out;
}

}  // namespace

TEST_CASE("dual basis and covolume") {
    auto z = cubic_lattice(3);
    CHECK((z.dual_basis - RMat::Identity(3, 3)).norm() == 0.0);
    CHECK(z.covolume == doctest::Approx(1.0));

    RMat b(2, 2);
    b << 2, 0, 0, 1;
    auto l = make_lattice(b);
    CHECK(l.dual_basis(0, 0) == doctest::Approx(0.5));
    CHECK(l.dual_basis(1, 1) == doctest::Approx(1.0));
    CHECK(l.covolume == doctest::Approx(2.0));

    RMat h(2, 2);
    h << 1, 0.5, 0, std::sqrt(3.0) / 2;
    auto hex = make_lattice(h);
    CHECK(hex.covolume == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-14));
    CHECK((hex.basis.transpose() * hex.dual_basis - RMat::Identity(2, 2)).norm() < 1e-14);

    RMat sing(2, 2);
    sing << 1, 2, 2, 4;
    CHECK_THROWS_AS(make_lattice(sing), Error);
}

TEST_CASE("dual enumeration small cases") {
    auto z = cubic_lattice(3);
    auto d0 = make_delta(z, {0, 0, 0});
    CHECK(enumerate_dual(z, d0, 1.0).size() == 7);
    auto d1 = make_delta(z, {1, 0, 0});
    auto pts = enumerate_dual(z, d1, 0.5);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].alpha == IntVec{-1, 0, 0});
    CHECK(pts[1].alpha == IntVec{0, 0, 0});
    CHECK(pts[0].norm == doctest::Approx(0.5));
    CHECK(enumerate_dual(z, d1, 0.0).empty());
    CHECK(enumerate_dual(z, make_delta(z, {1, 1, 1}), 0.0).empty());
}

TEST_CASE("dual enumeration matches a brute-force box scan") {
    RMat h(2, 2);
    h << 1, 0.5, 0, std::sqrt(3.0) / 2;
    std::vector<Lattice> lats{cubic_lattice(2), cubic_lattice(3), make_lattice(h)};
    for (const auto& lat : lats) {
        int n = lat.n;
        for (int mask = 0; mask < (1 << n); ++mask) {
            IntVec bits(n);
            for (int j = 0; j < n; ++j) bits[j] = (mask >> j) & 1;
            auto d = make_delta(lat, bits);
            for (double R : {0.7, 1.9, 3.0}) {
                auto got = enumerate_dual(lat, d, R);
                auto want = brute_dual(lat, bits, R, 12);
                REQUIRE(got.size() == want.size());
                std::vector<IntVec> g;
                for (const auto& p : got) g.push_back(p.alpha);
                std::sort(g.begin(), g.end());
                std::sort(want.begin(), want.end());
                CHECK(g == want);
                for (std::size_t i = 1; i < got.size(); ++i) {
                    bool ordered = got[i - 1].norm < got[i].norm - 1e-12 ||
                                   (std::abs(got[i - 1].norm - got[i].norm) <= 1e-12 && got[i - 1].alpha < got[i].alpha);
                    CHECK(ordered);
                }
            }
        }
    }
}

TEST_CASE("lattice points, characters and hash") {
    auto z = cubic_lattice(3);
    auto pts = enumerate_lattice(z, 1.5);
    CHECK(pts.size() == 1 + 6 + 12);
    auto d = make_delta(z, {1, 1, 0});
    CHECK(character(d, {1, 0, 0}) == -1);
    CHECK(character(d, {1, 1, 5}) == 1);
    CHECK(character(d, {-1, 0, 0}) == -1);
    CHECK(delta_is_zero(make_delta(z, {0, 0, 0})));
    CHECK(!delta_is_zero(d));
    CHECK_THROWS_AS(make_delta(z, {1, 2, 0}), Error);
    CHECK_THROWS_AS(make_delta(z, {1, 0}), Error);
    CHECK(lattice_hash(z) == lattice_hash(cubic_lattice(3)));
    CHECK(lattice_hash(z) != lattice_hash(cubic_lattice(2)));
    RVec v = shifted_frequency(z, d, {0, -1, 2});
    CHECK(v(0) == doctest::Approx(0.5));
    CHECK(v(1) == doctest::Approx(-0.5));
    CHECK(v(2) == doctest::Approx(2.0));
}
