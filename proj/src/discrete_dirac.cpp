#include "spinlab/discrete_dirac.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinlab/linalg.hpp"
#include "spinlab/parallel.hpp"
#include "spinlab/spectrum_report.hpp"

namespace spinlab {

double ConformalFactor::eval_cell(const RVec& s) const {
    double v = 0.0;
    for (const auto& [m, c] : modes) {
        double ph = 0.0;
        for (int i = 0; i < n; ++i) ph += m[i] * s(i);
        v += (c * std::polar(1.0, 2.0 * kPi * ph)).real();
    }
    return v;
}

int ConformalFactor::max_mode() const {
    int mm = 0;
    for (const auto& kv : modes)
        for (int v : kv.first) mm = std::max(mm, std::abs(v));
    return mm;
}

namespace {

IntVec negate(const IntVec& m) {
    IntVec r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r[i] = -m[i];
    return r;
}

IntVec mirror_mode(const IntVec& alpha, const SpinStructureDelta& delta) {
    IntVec r(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) r[i] = -alpha[i] - delta.bits[i];
    return r;
}

void add_coeff(FourierSeries& s, const IntVec& m, cplx c) {
    auto it = s.find(m);
    if (it == s.end()) s.emplace(m, c);
    else it->second += c;
}

}  // namespace

void validate_real(const ConformalFactor& u) {
    double scale = 0.0;
    for (const auto& kv : u.modes) {
        require(static_cast<int>(kv.first.size()) == u.n, "conformal factor mode has wrong dimension");
        require(std::isfinite(kv.second.real()) && std::isfinite(kv.second.imag()), "conformal factor is not finite");
        scale = std::max(scale, std::abs(kv.second));
    }
    for (const auto& [m, c] : u.modes) {
        auto it = u.modes.find(negate(m));
        cplx partner = it == u.modes.end() ? cplx(0.0) : it->second;
        require(std::abs(partner - std::conj(c)) <= 1e-14 * std::max(scale, 1.0),
                "conformal factor is not real (u_{-m} != conj(u_m))");
    }
}

ConformalFactor parse_conformal_factor(const std::string& text, int n) {
    ConformalFactor u;
    u.n = n;
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty() || t == "0") return u;
    std::vector<std::string> tokens;
    std::stringstream ss(t);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(tok);
    std::size_t i = 0;
    while (i < tokens.size()) {
        const std::string& head = tokens[i];
        auto colon = head.find(':');
        if (colon == std::string::npos) fail(ErrorCode::Parse, "conformal factor: expected 'amp*cos:m1,...' at '" + head + "'");
        std::string lhs = head.substr(0, colon);
        double amp = 1.0;
        std::string kind = lhs;
        auto star = lhs.find('*');
        if (star != std::string::npos) {
            amp = parse_double(lhs.substr(0, star));
            kind = lhs.substr(star + 1);
        }
        if (kind != "cos" && kind != "sin") fail(ErrorCode::Parse, "conformal factor: unknown term kind '" + kind + "'");
        IntVec m;
        std::vector<std::string> parts{head.substr(colon + 1)};
        for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) {
            if (i + k >= tokens.size() || tokens[i + k].find(':') != std::string::npos)
                fail(ErrorCode::Parse, "conformal factor: term '" + head + "' needs " + std::to_string(n) + " mode indices");
            parts.push_back(tokens[i + k]);
        }
        for (const auto& p : parts) {
            double v = parse_double(p);
            if (v != std::floor(v) || std::abs(v) > 1000) fail(ErrorCode::Parse, "conformal factor: bad mode index '" + p + "'");
            m.push_back(static_cast<int>(v));
        }
        i += n;
        if (!std::isfinite(amp)) fail(ErrorCode::Parse, "conformal factor: non-finite amplitude");
        IntVec mn = negate(m);
        if (kind == "cos") {
            add_coeff(u.modes, m, 0.5 * amp);
            add_coeff(u.modes, mn, 0.5 * amp);
        } else if (m != mn) {
            add_coeff(u.modes, m, -0.5 * kI * amp);
            add_coeff(u.modes, mn, 0.5 * kI * amp);
        }
    }
    for (auto it = u.modes.begin(); it != u.modes.end();)
        it = std::abs(it->second) == 0.0 ? u.modes.erase(it) : std::next(it);
    validate_real(u);
    return u;
}

std::string describe(const ConformalFactor& u) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : u.modes) {
        if (!first) os << " ";
        first = false;
        os << "(";
        for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
        os << "):" << format_double(c.real()) << (c.imag() < 0 ? "" : "+") << format_double(c.imag()) << "i";
    }
    return first ? "0" : os.str();
}

FourierSeries fourier_coefficients(int n, const CellFunction& h, int max_mode, int grid) {
    require(n >= 1 && max_mode >= 0 && grid >= 2 * max_mode + 1, "fourier_coefficients: grid too small");
    long total = 1;
    for (int i = 0; i < n; ++i) total *= grid;
    std::vector<cplx> data(total);
    parallel_for(static_cast<std::size_t>(total), [&](std::size_t idx) {
        RVec s(n);
        long r = static_cast<long>(idx);
        for (int i = n - 1; i >= 0; --i) {
            s(i) = static_cast<double>(r % grid) / grid;
            r /= grid;
        }
        data[idx] = h(s);
    });
    int L = 2 * max_mode + 1;
    std::vector<cplx> tw(static_cast<std::size_t>(L) * grid);
    for (int k = 0; k < L; ++k)
        for (int g = 0; g < grid; ++g)
            tw[static_cast<std::size_t>(k) * grid + g] =
                std::polar(1.0 / grid, -2.0 * kPi * static_cast<double>((k - max_mode) * static_cast<long>(g) % grid) / grid);
    std::vector<long> dims(n, grid);
    for (int a = 0; a < n; ++a) {
        long outer = 1, inner = 1;
        for (int i = 0; i < a; ++i) outer *= dims[i];
        for (int i = a + 1; i < n; ++i) inner *= dims[i];
        std::vector<cplx> next(static_cast<std::size_t>(outer) * L * inner, cplx(0.0));
        for (long o = 0; o < outer; ++o)
            for (int k = 0; k < L; ++k)
                for (int g = 0; g < grid; ++g) {
                    cplx w = tw[static_cast<std::size_t>(k) * grid + g];
                    const cplx* src = &data[(o * grid + g) * inner];
                    cplx* dst = &next[(o * L + k) * inner];
                    for (long in = 0; in < inner; ++in) dst[in] += w * src[in];
                }
        data.swap(next);
        dims[a] = L;
    }
    FourierSeries out;
    for (long idx = 0; idx < static_cast<long>(data.size()); ++idx) {
        if (std::abs(data[idx]) < 1e-16) continue;
        IntVec m(n);
        long r = idx;
        for (int i = n - 1; i >= 0; --i) {
            m[i] = static_cast<int>(r % L) - max_mode;
            r /= L;
        }
        out.emplace(m, data[idx]);
    }
    return out;
}

namespace {

struct ModeSet {
    std::vector<DualPoint> modes;
    std::map<IntVec, int> index;
    int span = 0;  // max over axes of (max alpha_i - min alpha_i)
};

ModeSet make_mode_set(const Lattice& lat, const SpinStructureDelta& delta, double cutoff) {
    require(cutoff > 0.0, "cutoff must be positive");
    ModeSet ms;
    ms.modes = enumerate_dual(lat, delta, cutoff);
    require(!ms.modes.empty(), "truncated mode set is empty; increase the cutoff");
    for (std::size_t a = 0; a < ms.modes.size(); ++a) ms.index[ms.modes[a].alpha] = static_cast<int>(a);
    for (int i = 0; i < lat.n; ++i) {
        int lo = ms.modes[0].alpha[i], hi = lo;
        for (const auto& p : ms.modes) {
            lo = std::min(lo, p.alpha[i]);
            hi = std::max(hi, p.alpha[i]);
        }
        ms.span = std::max(ms.span, hi - lo);
    }
    return ms;
}

int quadrature_grid(int max_mode, int u_max_mode) { return 4 * std::max({max_mode, u_max_mode, 4}) + 1; }

// Dense offset table for coefficient lookup.
struct CoefficientTable {
    int n, M;
    std::vector<cplx> data;
    CoefficientTable(int n_, int M_, const FourierSeries& s) : n(n_), M(M_) {
        long total = 1;
        for (int i = 0; i < n; ++i) total *= 2 * M + 1;
        data.assign(total, cplx(0.0));
        for (const auto& [m, c] : s) {
            bool inside = true;
            for (int v : m) inside = inside && std::abs(v) <= M;
            if (inside) data[flat(m)] = c;
        }
    }
    long flat(const IntVec& m) const {
        long idx = 0;
        for (int i = 0; i < n; ++i) idx = idx * (2 * M + 1) + (m[i] + M);
        return idx;
    }
    cplx diff(const IntVec& a, const IntVec& b) const {
        long idx = 0;
        for (int i = 0; i < n; ++i) idx = idx * (2 * M + 1) + (a[i] - b[i] + M);
        return data[idx];
    }
};

CMat convolution_matrix(const ModeSet& ms, int n, const FourierSeries& coeffs) {
    int M = static_cast<int>(ms.modes.size());
    CoefficientTable table(n, ms.span, coeffs);
    CMat W(M, M);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) W(a, b) = table.diff(ms.modes[a].alpha, ms.modes[b].alpha);
    return 0.5 * (W + W.adjoint());
}

FourierSeries weight_coefficients(const Lattice& lat, const CellFunction& u, int u_max_mode, int span, double power) {
    int grid = quadrature_grid(span, u_max_mode);
    return fourier_coefficients(lat.n, [&](const RVec& s) { return std::exp(power * u(s)); }, span, grid);
}

HermitianOperator build_operator(const Lattice& lat, const SpinStructureDelta& delta, double cutoff,
                                 const FourierSeries* w_coeffs, const ModeSet& ms) {
    HermitianOperator op;
    op.lat = lat;
    op.delta = delta;
    op.rep = build_clifford_rep(lat.n);
    op.modes = ms.modes;
    op.index = ms.index;
    op.cutoff = cutoff;
    int M = static_cast<int>(ms.modes.size()), N = op.rep.N, n = lat.n;
    op.entries = CMat::Zero(M * N, M * N);
    std::vector<CMat> S(n);
    if (!w_coeffs) {
        for (int j = 0; j < n; ++j) {
            S[j] = CMat::Zero(M, M);
            for (int a = 0; a < M; ++a) S[j](a, a) = ms.modes[a].shifted(j);
        }
    } else {
        CMat W = convolution_matrix(ms, n, *w_coeffs);
        for (int j = 0; j < n; ++j) {
            RVec v(M);
            for (int a = 0; a < M; ++a) v(a) = ms.modes[a].shifted(j);
            CMat DW = v.asDiagonal() * W;
            S[j] = W * DW;
            S[j] = 0.5 * (S[j] + S[j].adjoint()).eval();
        }
    }
    std::vector<CMat> ig(n);
    for (int j = 0; j < n; ++j) ig[j] = (2.0 * kPi * kI) * op.rep.gammas[j];
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) {
            auto blk = op.entries.block(a * N, b * N, N, N);
            for (int j = 0; j < n; ++j)
                if (S[j](a, b) != 0.0) blk += S[j](a, b) * ig[j];
        }
    return op;
}

}  // namespace

HermitianOperator assemble_conformal_dirac(const Lattice& lat, const SpinStructureDelta& delta,
                                           const ConformalFactor& u, double cutoff) {
    require(u.n == lat.n, "conformal factor dimension differs from the lattice");
    validate_real(u);
    ModeSet ms = make_mode_set(lat, delta, cutoff);
    if (u.modes.empty()) return build_operator(lat, delta, cutoff, nullptr, ms);
    FourierSeries w = weight_coefficients(lat, [&](const RVec& s) { return u.eval_cell(s); }, u.max_mode(), ms.span, -0.5);
    return build_operator(lat, delta, cutoff, &w, ms);
}

HermitianOperator assemble_conformal_dirac(const Lattice& lat, const SpinStructureDelta& delta, const CellFunction& u,
                                           int u_max_mode, double cutoff) {
    ModeSet ms = make_mode_set(lat, delta, cutoff);
    FourierSeries w = weight_coefficients(lat, u, u_max_mode, ms.span, -0.5);
    return build_operator(lat, delta, cutoff, &w, ms);
}

EigenResult hermitian_spectrum(const HermitianOperator& op, bool want_vectors, double cluster_rel_tol) {
    const CMat& A = op.entries;
    require(A.rows() == A.cols() && A.rows() > 0, "hermitian_spectrum: empty operator");
    double amax = A.cwiseAbs().maxCoeff();
    double herm = (A - A.adjoint()).cwiseAbs().maxCoeff();
    require(herm <= 1e-12 * std::max(amax, 1e-300), "hermitian_spectrum: operator is not Hermitian");
    EigenResult res;
    CMat V;
    if (want_vectors) hermitian_eigensystem(A, res.values, V);
    else res.values = hermitian_eigenvalues(A);
    res.norm = res.values.cwiseAbs().maxCoeff();
    if (want_vectors) {
        CMat R = A * V - V * res.values.asDiagonal();
        for (int c = 0; c < V.cols(); ++c) res.max_residual = std::max(res.max_residual, R.col(c).norm());
        if (res.max_residual > 1e-10 * std::max(res.norm, 1e-300))
            fail(ErrorCode::Numeric, "eigenvector residual too large");
        int N = op.N();
        double scale = 1.0 / std::sqrt(op.lat.covolume);
        for (int c = 0; c < V.cols(); ++c) {
            FourierSpinorField f{op.lat, op.delta, op.rep, {}};
            for (std::size_t a = 0; a < op.modes.size(); ++a) {
                CVec blk = V.col(c).segment(static_cast<int>(a) * N, N) * scale;
                if (blk.norm() > 1e-15) f.coeffs[op.modes[a].alpha] = blk;
            }
            res.vectors.push_back(std::move(f));
        }
    }
    std::vector<double> vals(res.values.data(), res.values.data() + res.values.size());
    res.report.cutoff = op.cutoff;
    res.report.cluster_tol = cluster_rel_tol * res.norm;
    res.report.entries = cluster_sorted(vals, res.report.cluster_tol);
    res.report.provenance = Provenance::Discretized;
    res.report.n = op.lat.n;
    res.report.delta_bits = op.delta.bits;
    res.report.lattice_hash = lattice_hash(op.lat);
    return res;
}

CMat structure_mode_matrix(const HermitianOperator& op, StructureKind kind) {
    StructureMap sm = structure_map(op.rep, kind);
    int N = op.N();
    CMat M = CMat::Zero(op.dim(), op.dim());
    for (std::size_t a = 0; a < op.modes.size(); ++a) {
        auto it = op.index.find(mirror_mode(op.modes[a].alpha, op.delta));
        if (it == op.index.end()) fail(ErrorCode::Numeric, "mode set is not closed under reflection");
        M.block(it->second * N, static_cast<int>(a) * N, N, N) = sm.matrix;
    }
    return M;
}

double structure_defect(const HermitianOperator& op, StructureKind kind) {
    CMat M = structure_mode_matrix(op, kind);
    const CMat& A = op.entries;
    CMat lhs = M * A.conjugate();
    CMat rhs = A * M;
    CMat d = kind == StructureKind::RealAnticommutingK ? CMat(lhs + rhs) : CMat(lhs - rhs);
    return d.cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff();
}

const FourierSeries& QTensorField::component(int i, int j) const {
    static const FourierSeries empty;
    auto it = components.find({std::min(i, j), std::max(i, j)});
    return it == components.end() ? empty : it->second;
}

cplx QTensorField::eval_cell(int i, int j, const RVec& s) const {
    cplx v = 0.0;
    for (const auto& [m, c] : component(i, j)) {
        double ph = 0.0;
        for (int k = 0; k < n; ++k) ph += m[k] * s(k);
        v += c * std::polar(1.0, 2.0 * kPi * ph);
    }
    return v;
}

QTensorField energy_momentum_cross(const FourierSpinorField& psi_a, const FourierSpinorField& psi_b) {
    require(psi_a.lat.n == psi_b.lat.n && psi_a.delta.bits == psi_b.delta.bits,
            "energy_momentum: fields live on different tori");
    const Lattice& lat = psi_a.lat;
    int n = lat.n;
    QTensorField Q;
    Q.n = n;
    Q.covolume = lat.covolume;
    const auto& rep = psi_a.rep;
    for (const auto& [beta, cb] : psi_b.coeffs) {
        RVec vb = shifted_frequency(lat, psi_b.delta, beta);
        std::vector<CVec> gcb(n);
        for (int i = 0; i < n; ++i) gcb[i] = rep.gammas[i] * cb;
        for (const auto& [alpha, ca] : psi_a.coeffs) {
            RVec v = vb + shifted_frequency(lat, psi_a.delta, alpha);
            std::vector<cplx> p(n);
            for (int i = 0; i < n; ++i) p[i] = ca.dot(gcb[i]);
            IntVec m(n);
            for (int k = 0; k < n; ++k) m[k] = beta[k] - alpha[k];
            // 1/4 (2 pi i) [(v_a + v_b)_j p_i + (v_a + v_b)_i p_j], p_i = c_a^* gamma_i c_b
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    add_coeff(Q.components[{i, j}], m, 0.5 * kPi * kI * (v(j) * p[i] + v(i) * p[j]));
        }
    }
    return Q;
}

QTensorField energy_momentum(const FourierSpinorField& psi) { return energy_momentum_cross(psi, psi); }

MetricPerturbation MetricPerturbation::conformal(const FourierSeries& f) {
    MetricPerturbation k;
    k.kind = Kind::Conformal;
    k.f = f;
    return k;
}

MetricPerturbation MetricPerturbation::constant(const RMat& K) {
    require(K.rows() == K.cols(), "constant perturbation must be square");
    require((K - K.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, K.cwiseAbs().maxCoeff()),
            "constant perturbation must be symmetric");
    MetricPerturbation k;
    k.kind = Kind::ConstantSymmetric;
    k.K = K;
    return k;
}

cplx integrate_against(const QTensorField& Q, const MetricPerturbation& k) {
    cplx s = 0.0;
    if (k.kind == MetricPerturbation::Kind::Conformal) {
        for (int i = 0; i < Q.n; ++i) {
            const FourierSeries& q = Q.component(i, i);
            for (const auto& [m, c] : k.f) {
                auto it = q.find(negate(m));
                if (it != q.end()) s += c * it->second;
            }
        }
    } else {
        require(k.K.rows() == Q.n, "constant perturbation has wrong dimension");
        IntVec zero(Q.n, 0);
        for (int i = 0; i < Q.n; ++i)
            for (int j = 0; j < Q.n; ++j) {
                const FourierSeries& q = Q.component(i, j);
                auto it = q.find(zero);
                if (it != q.end()) s += k.K(i, j) * it->second;
            }
    }
    return -0.5 * Q.covolume * s;
}

namespace {

void check_cluster(const std::vector<FourierSpinorField>& cluster, double lambda) {
    require(!cluster.empty(), "eigenvalue_derivative: empty cluster");
    int d = static_cast<int>(cluster.size());
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            cplx g = 0.0;
            for (const auto& [alpha, ca] : cluster[a].coeffs) {
                auto it = cluster[b].coeffs.find(alpha);
                if (it != cluster[b].coeffs.end()) g += ca.dot(it->second);
            }
            g *= cluster[a].lat.covolume;
            require(std::abs(g - (a == b ? 1.0 : 0.0)) <= 1e-8, "eigenvalue_derivative: cluster is not orthonormal");
        }
        double err = 0.0, nrm = 0.0;
        for (const auto& [alpha, c] : cluster[a].coeffs) {
            RVec v = shifted_frequency(cluster[a].lat, cluster[a].delta, alpha);
            err += (dirac_symbol(cluster[a].rep, v) * c - lambda * c).squaredNorm();
            nrm += c.squaredNorm();
        }
        require(std::sqrt(err) <= 1e-8 * std::max(1.0, std::abs(lambda)) * std::sqrt(nrm),
                "eigenvalue_derivative: fields are not eigenfields for the given eigenvalue");
    }
}

}  // namespace

CMat derivative_matrix(const std::vector<FourierSpinorField>& cluster, double lambda, const MetricPerturbation& k) {
    check_cluster(cluster, lambda);
    int d = static_cast<int>(cluster.size());
    CMat V(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            V(a, b) = integrate_against(energy_momentum_cross(cluster[a], cluster[b]), k);
            V(b, a) = std::conj(V(a, b));
        }
    return V;
}

RVec eigenvalue_derivative(const std::vector<FourierSpinorField>& cluster, double lambda, const MetricPerturbation& k) {
    CMat V = derivative_matrix(cluster, lambda, k);
    Eigen::SelfAdjointEigenSolver<CMat> es(V);
    return es.eigenvalues();
}

CMat conformal_derivative_matrix(const std::vector<FourierSpinorField>& cluster, double lambda, const FourierSeries& f) {
    check_cluster(cluster, lambda);
    int d = static_cast<int>(cluster.size());
    CMat V(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            cplx s = 0.0;
            for (const auto& [alpha, ca] : cluster[a].coeffs)
                for (const auto& [beta, cb] : cluster[b].coeffs) {
                    IntVec m(alpha.size());
                    for (std::size_t i = 0; i < m.size(); ++i) m[i] = alpha[i] - beta[i];
                    auto it = f.find(m);
                    if (it != f.end()) s += it->second * ca.dot(cb);
                }
            V(a, b) = -0.5 * lambda * cluster[a].lat.covolume * s;
        }
    return V;
}

ConformalLaplacianResult conformal_laplacian_solve(const Lattice& lat, const ConformalFactor& u, double cutoff,
                                                   int count) {
    require(lat.n == 3, "conformal Laplacian requires n = 3");
    require(u.n == 3, "conformal factor dimension differs from the lattice");
    validate_real(u);
    SpinStructureDelta zero = make_delta(lat, IntVec(lat.n, 0));
    ModeSet ms = make_mode_set(lat, zero, cutoff);
    int M = static_cast<int>(ms.modes.size());
    require(count >= 1 && count <= M, "conformal Laplacian: count out of range");
    const double scal_coeff = 4.0 * (lat.n - 1) / (lat.n - 2);

    FourierSeries b = u.modes.empty()
                          ? FourierSeries{{IntVec(lat.n, 0), cplx(1.0)}}
                          : weight_coefficients(lat, [&](const RVec& s) { return u.eval_cell(s); }, u.max_mode(), ms.span, 2.0);
    CMat B = convolution_matrix(ms, lat.n, b);

    // real orthonormal basis: constant, and cos/sin pairs over {m, -m}
    struct Basis {
        int a, b;
        cplx ca, cb;
    };
    std::vector<Basis> basis;
    const double r2 = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < M; ++a) {
        const IntVec& m = ms.modes[a].alpha;
        IntVec mn = negate(m);
        if (m == mn) {
            basis.push_back({a, -1, 1.0, 0.0});
            continue;
        }
        if (!(mn < m)) continue;
        int b2 = ms.index.at(mn);
        basis.push_back({a, b2, r2, r2});
        basis.push_back({a, b2, -kI * r2, kI * r2});
    }
    int D = static_cast<int>(basis.size());
    RMat Ar = RMat::Zero(D, D), Br(D, D);
    for (int p = 0; p < D; ++p) {
        Ar(p, p) = scal_coeff * 4.0 * kPi * kPi * ms.modes[basis[p].a].norm * ms.modes[basis[p].a].norm;
        for (int q = 0; q < D; ++q) {
            cplx s = std::conj(basis[p].ca) * B(basis[p].a, basis[q].a) * basis[q].ca;
            if (basis[q].b >= 0) s += std::conj(basis[p].ca) * B(basis[p].a, basis[q].b) * basis[q].cb;
            if (basis[p].b >= 0) {
                s += std::conj(basis[p].cb) * B(basis[p].b, basis[q].a) * basis[q].ca;
                if (basis[q].b >= 0) s += std::conj(basis[p].cb) * B(basis[p].b, basis[q].b) * basis[q].cb;
            }
            Br(p, q) = s.real();
        }
    }
    Br = 0.5 * (Br + Br.transpose()).eval();
    ConformalLaplacianResult res;
    res.dim = D;
    RMat Z;
    generalized_symmetric_lowest(Ar, Br, count, res.values, &Z);
    res.ground_vector = Z.col(0);
    const RVec& g = res.ground_vector;
    res.ground_rayleigh = g.dot(Ar * g) / g.dot(Br * g);
    return res;
}

RVec conformal_laplacian_spectrum(const Lattice& lat, const ConformalFactor& u, double cutoff, int count) {
    return conformal_laplacian_solve(lat, u, cutoff, count).values;
}

double smallest_dirac_eigenvalue(const Lattice& lat, const SpinStructureDelta& delta, const ConformalFactor& u,
                                 double cutoff, HijaziSolver solver, int* iterations) {
    if (solver == HijaziSolver::Dense) {
        RVec w = hermitian_spectrum(assemble_conformal_dirac(lat, delta, u, cutoff), false).values;
        int best = 0;
        for (int i = 1; i < w.size(); ++i)
            if (std::abs(w(i)) < std::abs(w(best))) best = i;
        if (iterations) *iterations = 0;
        return w(best);
    }
    require(!delta_is_zero(delta), "iterative Dirac solve needs a spin structure without kernel");
    require(u.n == lat.n, "conformal factor dimension differs from the lattice");
    validate_real(u);
    ModeSet ms = make_mode_set(lat, delta, cutoff);
    CliffordRep rep = build_clifford_rep(lat.n);
    int M = static_cast<int>(ms.modes.size()), N = rep.N;
    FourierSeries w = u.modes.empty()
                          ? FourierSeries{{IntVec(lat.n, 0), cplx(1.0)}}
                          : weight_coefficients(lat, [&](const RVec& s) { return u.eval_cell(s); }, u.max_mode(), ms.span, -0.5);
    HermitianCholesky chol(convolution_matrix(ms, lat.n, w));
    std::vector<CMat> Kinv(M);
    for (int a = 0; a < M; ++a) {
        const RVec& v = ms.modes[a].shifted;
        Kinv[a] = (kI / (2.0 * kPi * v.squaredNorm())) * clifford_matrix(rep, v);
    }
    auto apply = [&](const CVec& x) {
        CMat X(M, N);
        for (int a = 0; a < M; ++a) X.row(a) = x.segment(a * N, N).transpose();
        chol.solve_in_place(X);
        for (int a = 0; a < M; ++a) X.row(a) = (Kinv[a] * X.row(a).transpose()).transpose();
        chol.solve_in_place(X);
        CVec y(M * N);
        for (int a = 0; a < M; ++a) y.segment(a * N, N) = X.row(a).transpose();
        return y;
    };
    LanczosResult lr = lanczos_extreme(apply, M * N);
    if (!lr.converged) fail(ErrorCode::Numeric, "Lanczos did not converge for the smallest Dirac eigenvalue");
    if (iterations) *iterations = lr.iterations;
    return 1.0 / lr.value;
}

HijaziResult hijazi_check(const Lattice& lat, const SpinStructureDelta& delta, const ConformalFactor& u, double cutoff,
                          HijaziSolver solver) {
    require(lat.n == 3, "hijazi_check requires n = 3");
    require(!delta_is_zero(delta), "hijazi_check requires a spin structure with some bit = 1");
    HijaziResult r;
    r.lambda1 = std::abs(smallest_dirac_eigenvalue(lat, delta, u, cutoff, solver, &r.lanczos_iterations));
    r.lambda1_sq = r.lambda1 * r.lambda1;
    ConformalLaplacianResult L = conformal_laplacian_solve(lat, u, cutoff, 1);
    r.mu0 = L.values(0);
    r.bound = lat.n / (4.0 * (lat.n - 1)) * r.mu0;
    r.margin = r.lambda1_sq - r.bound;
    r.dirac_dim = static_cast<int>(enumerate_dual(lat, delta, cutoff).size()) * build_clifford_rep(lat.n).N;
    r.laplace_dim = L.dim;
    return r;
}

}  // namespace spinlab
