#include "spinlab/torus_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinlab/parallel.hpp"

namespace spinlab {

CVec FourierSpinorField::eval_cell(const RVec& s) const {
    CVec out = CVec::Zero(rep.N);
    for (const auto& [alpha, c] : coeffs) {
        double phase = 0.0;
        for (int j = 0; j < lat.n; ++j) phase += (alpha[j] + 0.5 * delta.bits[j]) * s(j);
        out += std::polar(1.0, 2.0 * kPi * phase) * c;
    }
    return out;
}

CVec FourierSpinorField::eval(const RVec& x) const {
    require(x.size() == lat.n, "evaluation point has wrong dimension");
    return eval_cell(lat.dual_basis.transpose() * x);
}

double FourierSpinorField::l2_norm_sq() const {
    double s = 0.0;
    for (const auto& kv : coeffs) s += kv.second.squaredNorm();
    return lat.covolume * s;
}

FourierSpinorField empty_field(const Lattice& lat, const SpinStructureDelta& delta) {
    return {lat, delta, build_clifford_rep(lat.n), {}};
}

namespace {

SpectrumReport spectrum_from_norms(const Lattice& lat, const SpinStructureDelta& delta, double cutoff,
                                   const std::vector<double>& norms) {
    int N = 1 << (lat.n / 2);
    std::vector<double> vals;
    for (double r : norms) {
        double lam = 2.0 * kPi * r;
        if (r == 0.0) {
            vals.insert(vals.end(), N, 0.0);
        } else {
            vals.push_back(lam);
            vals.push_back(-lam);
        }
    }
    std::sort(vals.begin(), vals.end());
    SpectrumReport rep;
    rep.cutoff = cutoff;
    rep.cluster_tol = 1e-12 * std::max(1.0, 2.0 * kPi * cutoff);
    rep.entries = cluster_sorted(vals, rep.cluster_tol);
    for (auto& e : rep.entries)
        if (e.value != 0.0) e.multiplicity = N * e.multiplicity / 2;
    rep.provenance = Provenance::Analytic;
    rep.n = lat.n;
    rep.delta_bits = delta.bits;
    rep.lattice_hash = lattice_hash(lat);
    return rep;
}

}  // namespace

SpectrumReport torus_dirac_spectrum(const Lattice& lat, const SpinStructureDelta& delta, double cutoff) {
    require(cutoff > 0.0, "cutoff must be positive");
    std::vector<double> norms;
    for (const auto& p : enumerate_dual(lat, delta, cutoff)) norms.push_back(p.norm);
    return spectrum_from_norms(lat, delta, cutoff, norms);
}

SpectrumReport flat_metric_spectrum(const Lattice& lat, const SpinStructureDelta& delta, const RMat& G,
                                    double cutoff) {
    require(cutoff > 0.0, "cutoff must be positive");
    require(G.rows() == lat.n && G.cols() == lat.n, "metric has wrong dimension");
    require((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff(), "metric is not symmetric");
    Eigen::LLT<RMat> llt(G);
    require(llt.info() == Eigen::Success, "metric is not positive definite");
    RMat Ginv = G.inverse();
    // G-norm of a covector is at least |v| / sqrt(lambda_max(G)): enlarge the Euclidean search.
    double lmin = Eigen::SelfAdjointEigenSolver<RMat>(Ginv).eigenvalues().minCoeff();
    require(lmin > 0.0, "metric is not positive definite");
    std::vector<double> norms;
    for (const auto& p : enumerate_dual(lat, delta, cutoff / std::sqrt(lmin))) {
        double r = std::sqrt(p.shifted.dot(Ginv * p.shifted));
        if (r <= cutoff * (1.0 + 1e-13)) norms.push_back(r);
    }
    return spectrum_from_norms(lat, delta, cutoff, norms);
}

CMat dirac_symbol(const CliffordRep& rep, const RVec& v) { return (2.0 * kPi * kI) * clifford_matrix(rep, v); }

CMat eigenspace_basis(const CliffordRep& rep, const RVec& v, int mu) {
    require(mu == 1 || mu == -1, "mu must be +1 or -1");
    double nv = v.norm();
    require(nv > 0.0, "eigenspace_basis: zero frequency");
    CMat P = 0.5 * (CMat::Identity(rep.N, rep.N) + double(mu) * kI * clifford_matrix(rep, v / nv));
    // modified Gram-Schmidt over projected standard basis vectors
    std::vector<CVec> basis;
    for (int c = 0; c < rep.N; ++c) {
        CVec w = P.col(c);
        for (const auto& b : basis) w -= b.dot(w) * b;
        for (const auto& b : basis) w -= b.dot(w) * b;
        double nw = w.norm();
        if (nw > 1e-8) basis.push_back(w / nw);
    }
    CMat out(rep.N, static_cast<int>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) out.col(static_cast<int>(k)) = basis[k];
    return out;
}

FourierSpinorField torus_eigenspinor(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha,
                                     int mu, int j) {
    require(static_cast<int>(alpha.size()) == lat.n, "alpha has wrong dimension");
    require(mu == 1 || mu == -1, "mu must be +1 or -1");
    FourierSpinorField f = empty_field(lat, delta);
    RVec v = shifted_frequency(lat, delta, alpha);
    require(v.norm() > 0.0, "torus_eigenspinor: alpha + delta = 0");
    int jmax = std::max(1, f.rep.N / 2);
    require(j >= 1 && j <= jmax, "eigenspinor index j out of range");
    CMat B = eigenspace_basis(f.rep, v, mu);
    if (B.cols() != jmax) fail(ErrorCode::Numeric, "projector rank deficiency in eigenspinor construction");
    f.coeffs[alpha] = B.col(j - 1);
    return f;
}

FourierSpinorField two_frequency_field(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha,
                                       const IntVec& alpha2) {
    FourierSpinorField f = empty_field(lat, delta);
    require(f.rep.N == 2, "two_frequency_field needs spinor dimension 2");
    RVec v = shifted_frequency(lat, delta, alpha);
    RVec v2 = shifted_frequency(lat, delta, alpha2);
    require(v.norm() > 0.0, "two_frequency_field: alpha + delta = 0");
    require(std::abs(v.norm() - v2.norm()) <= 1e-12 * v.norm(), "two_frequency_field: norms differ");
    IntVec mirror(lat.n);
    for (int j = 0; j < lat.n; ++j) mirror[j] = -alpha[j] - delta.bits[j];
    require(alpha2 != alpha && alpha2 != mirror, "two_frequency_field: alpha2 must differ from alpha and its mirror");
    CVec phi = eigenspace_basis(f.rep, v2, 1).col(0);
    CMat Pp = eigenspace_basis(f.rep, v, 1), Pm = eigenspace_basis(f.rep, v, -1);
    CVec phip = Pp * (Pp.adjoint() * phi), phim = Pm * (Pm.adjoint() * phi);
    f.coeffs[alpha] = phip;
    f.coeffs[mirror] = phim;
    f.coeffs[alpha2] = -phi;
    return f;
}

namespace {

struct GridIndexer {
    int n, g;
    long total() const {
        long t = 1;
        for (int i = 0; i < n; ++i) t *= g;
        return t;
    }
    IntVec unpack(long idx) const {
        IntVec c(n);
        for (int i = n - 1; i >= 0; --i) {
            c[i] = static_cast<int>(idx % g);
            idx /= g;
        }
        return c;
    }
    long pack(const IntVec& c) const {
        long idx = 0;
        for (int i = 0; i < n; ++i) idx = idx * g + ((c[i] % g) + g) % g;
        return idx;
    }
    RVec cell(const IntVec& c) const {
        RVec s(n);
        for (int i = 0; i < n; ++i) s(i) = static_cast<double>(c[i]) / g;
        return s;
    }
};

int find_root(std::vector<int>& parent, int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
}

}  // namespace

ZeroSetScan zero_set_scan(const FourierSpinorField& field, int grid_per_axis) {
    require(grid_per_axis >= 8, "zero_set_scan: grid_per_axis must be >= 8");
    require(!field.coeffs.empty(), "zero_set_scan: empty field");
    GridIndexer gi{field.lat.n, grid_per_axis};
    long total = gi.total();
    std::vector<double> mag(total);
    parallel_for(static_cast<std::size_t>(total),
                 [&](std::size_t i) { mag[i] = field.eval_cell(gi.cell(gi.unpack(static_cast<long>(i)))).norm(); });
    ZeroSetScan out;
    out.grid = grid_per_axis;
    out.max_abs = *std::max_element(mag.begin(), mag.end());
    require(out.max_abs > 0.0, "zero_set_scan: field vanishes on the grid");
    out.threshold = kZeroRelThreshold * out.max_abs;

    std::vector<long> hits;
    for (long i = 0; i < total; ++i)
        if (mag[i] <= out.threshold) hits.push_back(i);
    std::map<long, int> slot;
    for (std::size_t k = 0; k < hits.size(); ++k) slot[hits[k]] = static_cast<int>(k);
    std::vector<int> parent(hits.size());
    std::iota(parent.begin(), parent.end(), 0);
    int n = field.lat.n;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        IntVec c = gi.unpack(hits[k]);
        GridIndexer off{n, 3};
        for (long o = 0; o < off.total(); ++o) {
            IntVec d = off.unpack(o), nb = c;
            bool self = true;
            for (int i = 0; i < n; ++i) {
                nb[i] += d[i] - 1;
                if (d[i] != 1) self = false;
            }
            if (self) continue;
            auto it = slot.find(gi.pack(nb));
            if (it != slot.end()) parent[find_root(parent, static_cast<int>(k))] = find_root(parent, it->second);
        }
    }
    std::map<int, int> label;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        int r = find_root(parent, static_cast<int>(k));
        auto it = label.find(r);
        if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size())).first;
        out.points.push_back({gi.cell(gi.unpack(hits[k])), mag[hits[k]], it->second});
    }
    out.num_clusters = static_cast<int>(label.size());
    return out;
}

double rotation_angle(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    double c = 0.5 * ((a.transpose() * b).trace() - 1.0);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

FrameFieldReport torus_frame_field(const FourierSpinorField& field, int grid) {
    require(field.lat.n == 3, "torus_frame_field requires n = 3");
    require(grid >= 2, "torus_frame_field: grid must be >= 2");
    require(!field.coeffs.empty(), "torus_frame_field: empty field");
    GridIndexer gi{3, grid};
    long total = gi.total();
    std::vector<CVec> values(total);
    parallel_for(static_cast<std::size_t>(total),
                 [&](std::size_t i) { values[i] = field.eval_cell(gi.cell(gi.unpack(static_cast<long>(i)))); });
    FrameFieldReport rep;
    rep.grid = grid;
    rep.min_abs = std::numeric_limits<double>::infinity();
    for (const auto& v : values) {
        rep.min_abs = std::min(rep.min_abs, v.norm());
        rep.max_abs = std::max(rep.max_abs, v.norm());
    }
    require(rep.min_abs > 10.0 * kZeroRelThreshold * rep.max_abs, "torus_frame_field: field has near-zeros");

    rep.frames.resize(total);
    for (long i = 0; i < total; ++i) {
        const Eigen::Matrix3d R = frame_from_spinor(values[i]);
        rep.frames[i] = R;
        rep.max_orthonormality_error = std::max(
            rep.max_orthonormality_error, (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
        rep.max_det_error = std::max(rep.max_det_error, std::abs(R.determinant() - 1.0));
    }
    for (long i = 0; i < total; ++i) {
        IntVec c = gi.unpack(i);
        for (int d = 0; d < 3; ++d) {
            IntVec nb = c;
            nb[d] += 1;
            rep.max_neighbor_angle = std::max(rep.max_neighbor_angle, rotation_angle(rep.frames[i], rep.frames[gi.pack(nb)]));
            if (c[d] != 0) continue;
            // the same physical point reached through the opposite face of the cell
            RVec s = gi.cell(c);
            s(d) = 1.0;
            Eigen::Matrix3d across = frame_from_spinor(field.eval_cell(s));
            rep.max_seam_jump = std::max(rep.max_seam_jump, (across - rep.frames[i]).cwiseAbs().maxCoeff());
        }
    }
    return rep;
}

}  // namespace spinlab
