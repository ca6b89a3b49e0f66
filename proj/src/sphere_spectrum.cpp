#include "spinlab/sphere_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "spinlab/parallel.hpp"

namespace spinlab {

namespace {

Rational binom(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Rational r(1);
    for (int i = 1; i <= k; ++i) r = r * Rational(n - k + i) / Rational(i);
    return r;
}

long long as_integer(const Rational& r) {
    if (r.denominator() != 1) fail(ErrorCode::Numeric, "non-integral multiplicity");
    return r.numerator();
}

}  // namespace

std::vector<SphereDiracRow> sphere_dirac_spectrum(int n, int m_max) {
    require(n >= 2, "sphere_dirac_spectrum: n must be >= 2");
    require(m_max >= 0 && m_max <= 60, "sphere_dirac_spectrum: m_max must be in [0,60]");
    std::vector<SphereDiracRow> rows;
    long long N = 1LL << (n / 2);
    for (int m = 0; m <= m_max; ++m) rows.push_back({m, n + 2 * m, N * as_integer(binom(m + n - 1, m))});
    return rows;
}

std::vector<SphereLaplaceRow> sphere_laplace_spectrum(int n, int k_max) {
    require(n >= 2, "sphere_laplace_spectrum: n must be >= 2");
    require(k_max >= 0 && k_max <= 60, "sphere_laplace_spectrum: k_max must be in [0,60]");
    std::vector<SphereLaplaceRow> rows;
    for (int k = 0; k <= k_max; ++k) {
        Rational mult = Rational(n + 2 * k - 1, n + k - 1) * binom(n + k - 1, k);
        rows.push_back({k, static_cast<long long>(k) * (n + k - 1), as_integer(mult)});
    }
    return rows;
}

double SphereEigenspinorSpec::eigenvalue() const { return eps * (k + 0.5 * (n() - 1)) - 0.5 * mu; }

double SphereEigenspinorSpec::coefficient() const { return 0.5 * mu * (1 - n()) + eps * (k + 0.5 * (n() - 1)); }

std::vector<CVec> ambient_constant_spinors(const CliffordRep& ambient) {
    int N = ambient.N;
    std::vector<CVec> out;
    if (ambient.n % 2 == 1) {
        for (int c = 0; c < N; ++c) out.push_back(CVec::Unit(N, c));
        return out;
    }
    CMat P = 0.5 * (CMat::Identity(N, N) + ambient.omega);
    for (int c = 0; c < N; ++c) {
        CVec w = P.col(c);
        for (const auto& b : out) w -= b.dot(w) * b;
        double nw = w.norm();
        if (nw > 1e-8) out.push_back(w / nw);
    }
    if (static_cast<int>(out.size()) != N / 2) fail(ErrorCode::Numeric, "half-spinor space has wrong dimension");
    return out;
}

SphereEigenspinorSpec make_sphere_spec(const HarmonicPolynomial& f, int eps, int mu, int j) {
    require(eps == 1 || eps == -1, "eps must be +1 or -1");
    require(mu == 1 || mu == -1, "mu must be +1 or -1");
    int n = f.ambient_dim() - 1;
    require(n >= 2, "sphere eigenspinors need n >= 2");
    require(!(f.degree == 0 && eps == mu), "excluded identically-zero eigenspinor (k = 0, eps = mu)");
    require(!f.p.is_zero(), "zero polynomial");
    SphereEigenspinorSpec s;
    s.k = f.degree;
    s.mu = mu;
    s.eps = eps;
    s.f = f;
    s.ambient_rep = build_clifford_rep(n + 1);
    s.constant_spinors = ambient_constant_spinors(s.ambient_rep);
    require(j >= 1 && j <= static_cast<int>(s.constant_spinors.size()), "constant spinor index j out of range");
    s.j = j;
    return s;
}

RVec sphere_gradient(const HarmonicPolynomial& f, const RVec& x) {
    return f.p.gradient(x) - static_cast<double>(f.degree) * f.p.eval(x) * x;
}

CVec sphere_eigenspinor_eval(const SphereEigenspinorSpec& spec, const RVec& x) {
    require(x.size() == spec.f.ambient_dim(), "point has wrong dimension");
    require(std::abs(x.norm() - 1.0) <= 1e-12, "point is not on the unit sphere");
    const CVec& a = spec.constant_spinors[spec.j - 1];
    CVec phi = spec.mu == 1 ? a : clifford_apply(spec.ambient_rep, x, a);
    return spec.coefficient() * spec.f.p.eval(x) * phi + clifford_apply(spec.ambient_rep, sphere_gradient(spec.f, x), phi);
}

namespace {

double radical_inverse(unsigned prime, unsigned long index) {
    double inv = 1.0 / prime, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % prime);
        index /= prime;
        f *= inv;
    }
    return r;
}

const unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

struct CellKey {
    std::vector<long> c;
    bool operator==(const CellKey& o) const { return c == o.c; }
};
struct CellHash {
    std::size_t operator()(const CellKey& k) const {
        std::size_t h = 1469598103934665603ULL;
        for (long v : k.c) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
        return h;
    }
};

class SpatialHash {
public:
    SpatialHash(int dim, double cell) : dim_(dim), cell_(cell) {}
    CellKey key(const RVec& x) const {
        CellKey k;
        for (int i = 0; i < dim_; ++i) k.c.push_back(static_cast<long>(std::floor(x(i) / cell_)));
        return k;
    }
    void insert(const RVec& x, int id) { map_[key(x)].push_back(id); }
    template <class F>
    void neighbors(const RVec& x, F&& visit) const {
        CellKey base = key(x);
        int total = 1;
        for (int i = 0; i < dim_; ++i) total *= 3;
        for (int o = 0; o < total; ++o) {
            CellKey k = base;
            int r = o;
            for (int i = 0; i < dim_; ++i) {
                k.c[i] += (r % 3) - 1;
                r /= 3;
            }
            auto it = map_.find(k);
            if (it == map_.end()) continue;
            for (int id : it->second) visit(id);
        }
    }

private:
    int dim_;
    double cell_;
    std::unordered_map<CellKey, std::vector<int>, CellHash> map_;
};

struct NewtonResult {
    RVec x;
    bool converged = false;
};

Eigen::VectorXd residual(const HarmonicPolynomial& f, const RVec& x) {
    int d = static_cast<int>(x.size());
    Eigen::VectorXd F(d + 1);
    F.head(d) = f.p.gradient(x);
    F(d) = x.squaredNorm() - 1.0;
    return F;
}

// Riemannian gradient descent on |grad f|^2 / 2 over the sphere until close to the zero set.
RVec descend(const HarmonicPolynomial& f, RVec x, int iters, double gscale) {
    auto phi = [&](const RVec& y) { return 0.5 * f.p.gradient(y).squaredNorm(); };
    double val = phi(x);
    for (int it = 0; it < iters && std::sqrt(2.0 * val) > 1e-3 * gscale; ++it) {
        RMat H = f.p.hessian(x);
        RVec g = H * f.p.gradient(x);
        g -= g.dot(x) * x;
        double gn = g.squaredNorm();
        if (gn == 0.0) break;
        double hn = H.squaredNorm();
        double t = hn > 0.0 ? 1.0 / hn : 1.0;
        RVec trial = (x - t * g).normalized();
        double tv = phi(trial);
        for (int h = 0; h < 40 && tv > val - 1e-4 * t * gn; ++h) {
            t *= 0.5;
            trial = (x - t * g).normalized();
            tv = phi(trial);
        }
        if (tv >= val) break;
        x = trial;
        val = tv;
    }
    return x;
}

// Gauss-Newton on (grad f, |x|^2 - 1) with the step restricted to the numerically dominant singular
// directions, so that directions along the zero set are left alone.
NewtonResult refine(const HarmonicPolynomial& f, RVec x, int iters, double gscale) {
    int d = static_cast<int>(x.size());
    x = descend(f, x, 4 * iters, gscale);
    Eigen::VectorXd F = residual(f, x);
    for (int it = 0; it < iters; ++it) {
        RMat J(d + 1, d);
        J.topRows(d) = f.p.hessian(x);
        J.row(d) = 2.0 * x.transpose();
        Eigen::JacobiSVD<RMat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RVec& sv = svd.singularValues();
        RVec step = RVec::Zero(d);
        for (int i = 0; i < sv.size(); ++i)
            if (sv(i) > 1e-2 * sv(0)) step -= (svd.matrixU().col(i).dot(F) / sv(i)) * svd.matrixV().col(i);
        double fn = F.norm();
        RVec trial = x + step;
        Eigen::VectorXd Ft = residual(f, trial);
        for (int h = 0; h < 40 && Ft.norm() > fn; ++h) {
            step *= 0.5;
            trial = x + step;
            Ft = residual(f, trial);
        }
        x = trial;
        F = Ft;
        if (step.norm() <= 1e-12 && F.head(d).norm() <= 1e-12 * gscale && std::abs(F(d)) <= 1e-12)
            return {x / x.norm(), true};
    }
    return {x, false};
}

}  // namespace

std::vector<RVec> sphere_samples(int dim, int count, unsigned seed) {
    require(dim >= 2 && dim <= 16, "sphere_samples: dimension must be in [2,16]");
    std::vector<RVec> out;
    out.reserve(count);
    int pairs = (dim + 1) / 2;
    unsigned long offset = 1 + static_cast<unsigned long>(seed) * 1000003UL;
    for (int i = 0; i < count; ++i) {
        RVec g(2 * pairs);
        for (int p = 0; p < pairs; ++p) {
            double u1 = radical_inverse(kPrimes[2 * p], offset + i);
            double u2 = radical_inverse(kPrimes[2 * p + 1], offset + i);
            u1 = std::max(u1, 1e-300);
            double r = std::sqrt(-2.0 * std::log(u1));
            g(2 * p) = r * std::cos(2.0 * kPi * u2);
            g(2 * p + 1) = r * std::sin(2.0 * kPi * u2);
        }
        RVec x = g.head(dim);
        double nx = x.norm();
        if (nx < 1e-8) continue;
        out.push_back(x / nx);
    }
    return out;
}

SphereZeroScan sphere_zero_scan(const HarmonicPolynomial& f, int samples, int newton_iters, unsigned seed) {
    require(f.degree >= 1, "sphere_zero_scan: degree must be >= 1");
    require(samples >= 1, "sphere_zero_scan: samples must be >= 1");
    require(newton_iters >= 1, "sphere_zero_scan: newton_iters must be >= 1");
    int d = f.ambient_dim();
    std::vector<RVec> seeds = sphere_samples(d, samples, seed);
    double gscale = 0.0;
    for (const auto& s : seeds) gscale = std::max(gscale, f.p.gradient(s).norm());
    gscale = std::max(gscale, 1e-300);

    std::vector<NewtonResult> res(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) { res[i] = refine(f, seeds[i], newton_iters, gscale); });

    SphereZeroScan out;
    out.seeds = static_cast<int>(seeds.size());
    SpatialHash dedup(d, 1e-6);
    std::vector<RVec> pts;
    for (const auto& r : res) {
        if (!r.converged) continue;
        ++out.converged;
        bool dup = false;
        dedup.neighbors(r.x, [&](int id) { dup = dup || (pts[id] - r.x).norm() <= 1e-6; });
        if (dup) continue;
        dedup.insert(r.x, static_cast<int>(pts.size()));
        pts.push_back(r.x);
    }
    std::sort(pts.begin(), pts.end(), [](const RVec& a, const RVec& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });

    // tangent spaces of the zero set: null space of the Hessian restricted to x^perp
    int m = static_cast<int>(pts.size());
    std::vector<RMat> tangent(m);
    std::vector<int> nullity(m, 0);
    std::vector<RMat> hess(m);
    double hscale = 0.0;
    for (int i = 0; i < m; ++i) {
        hess[i] = f.p.hessian(pts[i]);
        hscale = std::max(hscale, hess[i].norm());
    }
    for (int i = 0; i < m; ++i) {
        Eigen::HouseholderQR<RMat> qr(RMat(pts[i]));
        RMat Q = qr.householderQ();
        RMat T = Q.rightCols(d - 1);
        RMat M = T.transpose() * hess[i] * T;
        Eigen::SelfAdjointEigenSolver<RMat> es(M);
        std::vector<int> cols;
        for (int c = 0; c < d - 1; ++c)
            if (std::abs(es.eigenvalues()(c)) <= 1e-3 * hscale) cols.push_back(c);
        nullity[i] = static_cast<int>(cols.size());
        tangent[i] = RMat(d, cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) tangent[i].col(c) = T * es.eigenvectors().col(cols[c]);
    }
    int base = m > 0 ? *std::min_element(nullity.begin(), nullity.end()) : 0;

    const double link = 0.15;
    SpatialHash grid(d, link);
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < m; ++i) {
        if (nullity[i] != base) continue;
        grid.neighbors(pts[i], [&](int j) {
            if ((pts[i] - pts[j]).norm() > link) return;
            if (base > 0) {
                Eigen::JacobiSVD<RMat> svd(tangent[i].transpose() * tangent[j]);
                if (svd.singularValues().minCoeff() < 0.9) return;
            }
            parent[root(i)] = root(j);
        });
        grid.insert(pts[i], i);
    }
    std::map<int, int> label;
    for (int i = 0; i < m; ++i) {
        SphereZero z{pts[i], f.p.gradient(pts[i]).norm(), -1};
        if (nullity[i] == base) {
            int r = root(i);
            auto it = label.find(r);
            if (it == label.end()) it = label.emplace(r, static_cast<int>(label.size())).first;
            z.cluster = it->second;
        } else {
            ++out.num_singular;
        }
        out.zeros.push_back(z);
    }
    out.num_clusters = static_cast<int>(label.size());
    return out;
}

}  // namespace spinlab
