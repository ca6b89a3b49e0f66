#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinlab/torus_spectrum.hpp"

using namespace spinlab;

namespace {

// Eigenvalues of 2 pi i v.gamma for every shifted dual vector in a brute-force box.
std::vector<double> brute_spectrum(const Lattice& lat, const IntVec& bits, double R) {
    auto rep = build_clifford_rep(lat.n);
    std::vector<double> vals;
    int n = lat.n, box = 8;
    IntVec a(n, -box);
    while (true) {
        RVec v = RVec::Zero(n);
        for (int j = 0; j < n; ++j) v += (a[j] + 0.5 * bits[j]) * lat.dual_basis.col(j);
        if (v.norm() <= R * (1 + 1e-13)) {
            CMat S = CMat::Zero(rep.N, rep.N);
            for (int j = 0; j < n; ++j) S += 2.0 * kPi * kI * v(j) * rep.gammas[j];
            Eigen::SelfAdjointEigenSolver<CMat> es(S);
            for (int i = 0; i < rep.N; ++i) vals.push_back(es.eigenvalues()(i));
        }
        int j = 0;
        while (j < n && ++a[j] > box) a[j++] = -box;
        if (j == n) break;
    }
    std::sort(vals.begin(), vals.end());
    return vals;
}

IntVec bits_of(int mask, int n) {
    IntVec b(n);
    for (int j = 0; j < n; ++j) b[j] = (mask >> j) & 1;
    return b;
}

}  // namespace

TEST_CASE("analytic torus spectrum equals brute-force symbol diagonalization") {
    for (int n : {2, 3}) {
        auto lat = cubic_lattice(n);
        for (int mask = 0; mask < (1 << n); ++mask) {
            IntVec bits = bits_of(mask, n);
            auto r = torus_dirac_spectrum(lat, make_delta(lat, bits), 3.0);
            auto want = brute_spectrum(lat, bits, 3.0);
            auto got = r.expanded();
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-12);
        }
    }
}

TEST_CASE("torus spectrum examples") {
    auto z3 = cubic_lattice(3);
    auto r0 = torus_dirac_spectrum(z3, make_delta(z3, {0, 0, 0}), 0.5);
    REQUIRE(r0.entries.size() == 1);
    CHECK(r0.entries[0].value == 0.0);
    CHECK(r0.entries[0].multiplicity == 2);

    auto r1 = torus_dirac_spectrum(z3, make_delta(z3, {1, 0, 0}), 0.5);
    REQUIRE(r1.entries.size() == 2);
    CHECK(r1.entries[0].value == doctest::Approx(-kPi).epsilon(1e-15));
    CHECK(r1.entries[0].multiplicity == 2);
    CHECK(r1.entries[1].value == doctest::Approx(kPi).epsilon(1e-15));
    CHECK(r1.entries[1].multiplicity == 2);

    auto z2 = cubic_lattice(2);
    auto r2 = torus_dirac_spectrum(z2, make_delta(z2, {0, 0}), 1.0);
    REQUIRE(r2.entries.size() == 3);
    CHECK(r2.entries[0].value == doctest::Approx(-2 * kPi));
    CHECK(r2.entries[0].multiplicity == 4);
    CHECK(r2.entries[2].multiplicity == 4);
    CHECK(r2.entries[1].value == 0.0);
    CHECK(r2.entries[1].multiplicity == 2);

    auto rt = spectrum_from_json(to_json(r1));
    CHECK(rt.entries.size() == r1.entries.size());
    CHECK(rt.entries[1].value == r1.entries[1].value);
    CHECK(rt.lattice_hash == r1.lattice_hash);
    CHECK_THROWS_AS(torus_dirac_spectrum(z3, make_delta(z3, {1, 0, 0}), -1.0), Error);
}

TEST_CASE("flat metric spectrum") {
    auto z3 = cubic_lattice(3);
    auto d = make_delta(z3, {1, 1, 0});
    auto a = torus_dirac_spectrum(z3, d, 2.5);
    auto b = flat_metric_spectrum(z3, d, RMat::Identity(3, 3), 2.5);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].value == doctest::Approx(b.entries[i].value).epsilon(1e-14));
        CHECK(a.entries[i].multiplicity == b.entries[i].multiplicity);
    }

    // circle of length 2: eigenvalues +-pi (k + 1/2)
    auto z1 = cubic_lattice(1);
    RMat G(1, 1);
    G << 4.0;
    auto c = flat_metric_spectrum(z1, make_delta(z1, {1}), G, 2.0);
    for (const auto& e : c.entries) {
        double k = std::abs(e.value) / kPi - 0.5;
        CHECK(std::abs(k - std::round(k)) < 1e-12);
        CHECK(e.multiplicity == 1);
    }

    RMat bad(3, 3);
    bad << 1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK_THROWS_AS(flat_metric_spectrum(z3, d, bad, 2.0), Error);
}

TEST_CASE("single-mode eigenspinors") {
    auto z2 = cubic_lattice(2);
    auto d = make_delta(z2, {1, 1});
    auto psi = torus_eigenspinor(z2, d, {0, 0}, 1, 1);
    for (double x : {0.0, 0.13, 0.5, 0.77})
        for (double y : {0.0, 0.41, 0.9}) {
            RVec p(2);
            p << x, y;
            CHECK(psi.eval(p).norm() == doctest::Approx(1.0).epsilon(1e-14));
        }
    auto rep2 = build_clifford_rep(2);
    RVec v = shifted_frequency(z2, d, {0, 0});
    const CVec& c = psi.coeffs.begin()->second;
    CHECK((dirac_symbol(rep2, v) * c - 2 * kPi * (std::sqrt(2.0) / 2) * c).norm() < 1e-12);

    auto z3 = cubic_lattice(3);
    auto rep3 = build_clifford_rep(3);
    for (int mask = 1; mask < 8; ++mask) {
        auto d3 = make_delta(z3, bits_of(mask, 3));
        for (IntVec alpha : {IntVec{0, 0, 0}, IntVec{1, -1, 0}, IntVec{-2, 0, 1}})
            for (int mu : {1, -1}) {
                auto f = torus_eigenspinor(z3, d3, alpha, mu, 1);
                RVec w = shifted_frequency(z3, d3, alpha);
                const CVec& cc = f.coeffs.at(alpha);
                CHECK((dirac_symbol(rep3, w) * cc - 2 * kPi * mu * w.norm() * cc).norm() < 1e-12);
                // J psi has frequency -(alpha + delta) and the same eigenvalue
                auto J = structure_map(rep3, StructureKind::QuatCommutingJ);
                CVec jc = J.apply(cc);
                CHECK((dirac_symbol(rep3, -w) * jc - 2 * kPi * mu * w.norm() * jc).norm() < 1e-12);
            }
    }
    CHECK_THROWS_AS(torus_eigenspinor(z3, make_delta(z3, {1, 0, 0}), {0, 0, 0}, 1, 2), Error);
    CHECK_THROWS_AS(torus_eigenspinor(z3, make_delta(z3, {0, 0, 0}), {0, 0, 0}, 1, 1), Error);
}

TEST_CASE("zero sets") {
    auto z2 = cubic_lattice(2);
    auto d = make_delta(z2, {1, 1});
    CHECK(zero_set_scan(torus_eigenspinor(z2, d, {0, 0}, 1, 1), 32).points.empty());

    auto f = two_frequency_field(z2, d, {0, 0}, {-1, 0});
    // zeros where (x1 + x2)/2 and (x2 - x1)/2 are both integers or both half-integers
    RVec o = RVec::Zero(2);
    CHECK(f.eval(o).norm() < 1e-14);
    RVec q(2);
    q << 0.5, 0.5;
    CHECK(f.eval(q).norm() > 0.1);
    RVec p(2);
    p << 1.0, 0.0;
    CHECK(f.eval(p).norm() < 1e-13);

    auto scan = zero_set_scan(f, 32);
    CHECK(scan.num_clusters == 1);
    for (const auto& z : scan.points) {
        double dx = std::min(z.s(0), 1 - z.s(0)), dy = std::min(z.s(1), 1 - z.s(1));
        CHECK(std::hypot(dx, dy) < 1e-12);
    }

    auto g = f;
    for (auto& [a, c] : g.coeffs) c *= 1e6;
    auto scan2 = zero_set_scan(g, 32);
    CHECK(scan2.num_clusters == scan.num_clusters);
    CHECK(scan2.points.size() == scan.points.size());
}

TEST_CASE("frame fields") {
    auto z3 = cubic_lattice(3);
    auto d0 = make_delta(z3, {0, 0, 0});
    auto rep = build_clifford_rep(3);
    FourierSpinorField c = empty_field(z3, d0);
    CVec s(2);
    s << cplx(0.6, 0.0), cplx(0.0, 0.8);
    c.coeffs[{0, 0, 0}] = s;
    auto fr = torus_frame_field(c, 8);
    CHECK(fr.max_seam_jump == 0.0);
    for (const auto& R : fr.frames) CHECK((R - fr.frames[0]).cwiseAbs().maxCoeff() == 0.0);

    auto d = make_delta(z3, {1, 1, 1});
    auto psi = torus_eigenspinor(z3, d, {0, 0, 0}, 1, 1);
    auto r32 = torus_frame_field(psi, 32);
    CHECK(r32.max_orthonormality_error <= 1e-12);
    CHECK(r32.max_det_error <= 1e-12);
    CHECK(r32.max_seam_jump <= 1e-8);
    auto r16 = torus_frame_field(psi, 16);
    CHECK(r32.max_neighbor_angle < 0.75 * r16.max_neighbor_angle);

    Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d Rz;
    Rz << std::cos(0.3), -std::sin(0.3), 0, std::sin(0.3), std::cos(0.3), 0, 0, 0, 1;
    CHECK(rotation_angle(I, Rz) == doctest::Approx(0.3).epsilon(1e-12));
}
