#include "spinlab/clifford.hpp"

#include <cmath>

namespace spinlab {

namespace {

CMat mat2(cplx a, cplx b, cplx c, cplx d) {
    CMat m(2, 2);
    m << a, b, c, d;
    return m;
}

CMat ordered_product(const CliffordRep& rep) {
    CMat p = CMat::Identity(rep.N, rep.N);
    for (const auto& g : rep.gammas) p = p * g;
    return p;
}

cplx i_power(int k) {
    static const cplx table[4] = {1.0, kI, -1.0, -kI};
    return table[((k % 4) + 4) % 4];
}

std::vector<CMat> generators(int n) {
    if (n == 1) return {CMat::Constant(1, 1, -kI)};
    if (n == 2) return {mat2(0, -1, 1, 0), mat2(0, kI, kI, 0)};
    if (n == 3) return {mat2(kI, 0, 0, -kI), mat2(0, -1, 1, 0), mat2(0, -kI, -kI, 0)};

    CliffordRep prev = build_clifford_rep(n - 1);
    std::vector<CMat> g;
    if (n % 2 == 0) {
        int h = prev.N;
        for (const auto& e : prev.gammas) {
            CMat m = CMat::Zero(2 * h, 2 * h);
            m.topLeftCorner(h, h) = e;
            m.bottomRightCorner(h, h) = -e;
            g.push_back(m);
        }
        CMat last = CMat::Zero(2 * h, 2 * h);
        last.topRightCorner(h, h) = kI * CMat::Identity(h, h);
        last.bottomLeftCorner(h, h) = kI * CMat::Identity(h, h);
        g.push_back(last);
    } else {
        g = prev.gammas;
        CMat last = kI * prev.omega;
        CliffordRep trial{n, prev.N, g, {}};
        trial.gammas.push_back(last);
        CMat w = i_power((n + 1) / 2) * ordered_product(trial);
        if (std::abs(w(0, 0) + 1.0) < 0.5) last = -last;
        g.push_back(last);
    }
    return g;
}

}  // namespace

CliffordRep build_clifford_rep(int n) {
    require(n >= 1 && n <= 8, "clifford dimension must be in [1,8], got " + std::to_string(n));
    CliffordRep rep;
    rep.n = n;
    rep.N = 1 << (n / 2);
    rep.gammas = generators(n);
    rep.omega = volume_element(rep);
    return rep;
}

CMat volume_element(const CliffordRep& rep) {
    return i_power((rep.n + 1) / 2) * ordered_product(rep);
}

CMat clifford_matrix(const CliffordRep& rep, const RVec& v) {
    require(v.size() == rep.n, "clifford vector has wrong dimension");
    CMat m = CMat::Zero(rep.N, rep.N);
    for (int i = 0; i < rep.n; ++i) m += v(i) * rep.gammas[i];
    return m;
}

CVec clifford_apply(const CliffordRep& rep, const RVec& v, const CVec& sigma) {
    require(sigma.size() == rep.N, "spinor has wrong dimension");
    return clifford_matrix(rep, v) * sigma;
}

CVec clifford_apply(const CliffordRep& rep, const CVec& v, const CVec& sigma) {
    require(v.size() == rep.n, "clifford vector has wrong dimension");
    require(sigma.size() == rep.N, "spinor has wrong dimension");
    CVec out = CVec::Zero(rep.N);
    for (int i = 0; i < rep.n; ++i) out += v(i) * (rep.gammas[i] * sigma);
    return out;
}

StructureMap structure_map(const CliffordRep& rep, StructureKind kind) {
    require(rep.n == 2 || rep.n == 3, "structure maps are defined for n = 2, 3 only");
    if (kind == StructureKind::QuatCommutingJ) return {kind, mat2(0, -1, 1, 0)};
    require(rep.n == 2, "the anticommuting real structure exists for n = 2 only");
    return {kind, mat2(0, -1, -1, 0)};
}

Eigen::Matrix3d frame_from_spinor(const CVec& sigma) {
    require(sigma.size() == 2, "frame_from_spinor needs a 2-component spinor");
    double nrm = sigma.norm();
    require(nrm > 0.0 && std::isfinite(nrm), "frame_from_spinor: zero spinor");
    CVec s = sigma / nrm;
    // q maps s to (1,0); det q = |s|^2 = 1.
    CMat q = mat2(std::conj(s(0)), std::conj(s(1)), -s(1), s(0));
    CMat qinv = q.adjoint();
    static const CliffordRep rep3 = build_clifford_rep(3);
    Eigen::Matrix3d R;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            R(i, j) = -0.5 * (rep3.gammas[i] * qinv * rep3.gammas[j] * q).trace().real();
    return R;
}

}  // namespace spinlab
