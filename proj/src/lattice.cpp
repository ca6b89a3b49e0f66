#include "spinlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace spinlab {

Lattice make_lattice(const RMat& basis) {
    require(basis.rows() == basis.cols() && basis.rows() >= 1, "lattice basis must be square");
    int n = static_cast<int>(basis.rows());
    require(basis.allFinite(), "lattice basis has non-finite entries");
    double scale = basis.cwiseAbs().maxCoeff();
    double det = basis.determinant();
    require(scale > 0.0 && std::abs(det) > 1e-12 * std::pow(scale, n), "singular lattice basis");
    Lattice lat;
    lat.n = n;
    lat.basis = basis;
    lat.dual_basis = basis.inverse().transpose();
    lat.covolume = std::abs(det);
    return lat;
}

Lattice cubic_lattice(int n) { return make_lattice(RMat::Identity(n, n)); }

SpinStructureDelta make_delta(const Lattice& lat, const IntVec& bits) {
    require(static_cast<int>(bits.size()) == lat.n, "spin structure needs one bit per lattice direction");
    SpinStructureDelta d;
    d.bits = bits;
    d.offset_form = RVec::Zero(lat.n);
    for (int j = 0; j < lat.n; ++j) {
        require(bits[j] == 0 || bits[j] == 1, "spin structure bits must be 0 or 1");
        if (bits[j]) d.offset_form += 0.5 * lat.dual_basis.col(j);
    }
    return d;
}

bool delta_is_zero(const SpinStructureDelta& delta) {
    return std::all_of(delta.bits.begin(), delta.bits.end(), [](int b) { return b == 0; });
}

RVec shifted_frequency(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha) {
    RVec c(lat.n);
    for (int j = 0; j < lat.n; ++j) c(j) = alpha[j] + 0.5 * delta.bits[j];
    return lat.dual_basis * c;
}

namespace {

// Integer box scan; visit(coords) for every point of [lo, hi].
template <class F>
void scan_box(const IntVec& lo, const IntVec& hi, F&& visit) {
    int n = static_cast<int>(lo.size());
    for (int j = 0; j < n; ++j)
        if (lo[j] > hi[j]) return;
    IntVec c = lo;
    while (true) {
        visit(c);
        int j = n - 1;
        while (j >= 0 && c[j] == hi[j]) {
            c[j] = lo[j];
            --j;
        }
        if (j < 0) break;
        ++c[j];
    }
}

template <class P>
void sort_points(std::vector<P>& pts, auto key) {
    std::sort(pts.begin(), pts.end(), [&](const P& a, const P& b) {
        if (a.norm != b.norm) return a.norm < b.norm;
        return key(a) < key(b);
    });
    // norms equal up to rounding count as ties
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t j = i + 1;
        while (j < pts.size() && pts[j].norm - pts[i].norm <= 1e-12 * std::max(1.0, pts[i].norm)) ++j;
        std::sort(pts.begin() + i, pts.begin() + j, [&](const P& a, const P& b) { return key(a) < key(b); });
        i = j;
    }
}

}  // namespace

std::vector<DualPoint> enumerate_dual(const Lattice& lat, const SpinStructureDelta& delta, double R) {
    require(R >= 0.0 && std::isfinite(R), "enumeration radius must be finite and >= 0");
    int n = lat.n;
    // alpha_j + b_j/2 = gamma_j . shifted, so |alpha_j + b_j/2| <= R |gamma_j|.
    IntVec lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        double reach = R * lat.basis.col(j).norm() * (1.0 + 1e-12) + 1e-12;
        double half = 0.5 * delta.bits[j];
        lo[j] = static_cast<int>(std::floor(-reach - half));
        hi[j] = static_cast<int>(std::ceil(reach - half));
    }
    std::vector<DualPoint> out;
    double R2 = R * R;
    scan_box(lo, hi, [&](const IntVec& a) {
        RVec s = shifted_frequency(lat, delta, a);
        double nsq = s.squaredNorm();
        if (nsq <= R2 * (1.0 + 1e-13)) out.push_back({a, s, std::sqrt(nsq)});
    });
    sort_points(out, [](const DualPoint& p) { return p.alpha; });
    return out;
}

std::vector<LatticePoint> enumerate_lattice(const Lattice& lat, double R) {
    require(R >= 0.0 && std::isfinite(R), "enumeration radius must be finite and >= 0");
    int n = lat.n;
    IntVec lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        int m = static_cast<int>(std::ceil(R * lat.dual_basis.col(j).norm() * (1.0 + 1e-12) + 1e-12));
        lo[j] = -m;
        hi[j] = m;
    }
    std::vector<LatticePoint> out;
    double R2 = R * R;
    scan_box(lo, hi, [&](const IntVec& c) {
        RVec x = RVec::Zero(n);
        for (int j = 0; j < n; ++j) x += c[j] * lat.basis.col(j);
        double nsq = x.squaredNorm();
        if (nsq <= R2 * (1.0 + 1e-13)) out.push_back({c, x, std::sqrt(nsq)});
    });
    sort_points(out, [](const LatticePoint& p) { return p.coords; });
    return out;
}

int character(const SpinStructureDelta& delta, const IntVec& coords) {
    long s = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) s += static_cast<long>(delta.bits[j]) * coords[j];
    return (s % 2 == 0) ? 1 : -1;
}

std::string lattice_hash(const Lattice& lat) {
    std::uint64_t h = 1469598103934665603ULL;
    for (int j = 0; j < lat.n; ++j)
        for (int i = 0; i < lat.n; ++i) {
            double v = lat.basis(i, j);
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 1099511628211ULL;
            }
        }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace spinlab
