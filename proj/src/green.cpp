#include "spinlab/green.hpp"

#include <algorithm>
#include <cmath>

#include "spinlab/bessel.hpp"
#include "spinlab/parallel.hpp"

namespace spinlab {

namespace {

void check_dim(int n) { require(n == 2 || n == 3, "Green's functions are implemented for n = 2, 3"); }

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (m + 0.5)), dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = m * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

CVec default_gamma(int N) {
    CVec g(N);
    for (int i = 0; i < N; ++i) g(i) = cplx(1.0 / (i + 1), 0.3 * i);
    return g;
}

}  // namespace

GreenRadialProfile green_profile(int n, double lambda) {
    check_dim(n);
    require(std::isfinite(lambda), "lambda must be finite");
    GreenRadialProfile p;
    p.n = n;
    p.lambda = lambda;
    p.omega_nm1 = n == 2 ? 2.0 * kPi : 4.0 * kPi;
    return p;
}

double GreenRadialProfile::g(double r) const {
    double k = std::abs(lambda);
    if (n == 3) return std::cos(k * r) / (4.0 * kPi * r);
    if (k == 0.0) return -std::log(r) / (2.0 * kPi);
    double C = (std::log(k) - std::log(2.0) + kEulerGamma) / (2.0 * kPi);
    return -0.25 * bessel_y(0, k * r) + C * bessel_j(0, k * r);
}

double GreenRadialProfile::g_prime(double r) const {
    double k = std::abs(lambda);
    if (n == 3) return -(k * r * std::sin(k * r) + std::cos(k * r)) / (4.0 * kPi * r * r);
    if (k == 0.0) return -1.0 / (2.0 * kPi * r);
    double C = (std::log(k) - std::log(2.0) + kEulerGamma) / (2.0 * kPi);
    return k * (0.25 * bessel_y(1, k * r) - C * bessel_j(1, k * r));
}

double GreenRadialProfile::g_second(double r) const {
    double k = std::abs(lambda);
    if (n == 3) {
        double c = std::cos(k * r), s = std::sin(k * r);
        return (-k * k * r * r * c + 2.0 * k * r * s + 2.0 * c) / (4.0 * kPi * r * r * r);
    }
    if (k == 0.0) return 1.0 / (2.0 * kPi * r * r);
    double z = k * r;
    double C = (std::log(k) - std::log(2.0) + kEulerGamma) / (2.0 * kPi);
    double y1p = bessel_y(0, z) - bessel_y(1, z) / z;
    double j1p = bessel_j(0, z) - bessel_j(1, z) / z;
    return k * k * (0.25 * y1p - C * j1p);
}

double GreenRadialProfile::ode_residual(double r) const {
    return g_second(r) + (n - 1) * g_prime(r) / r + lambda * lambda * g(r);
}

GreenEval euclidean_green_eval(int n, double lambda, const RVec& x, const CVec& gamma) {
    check_dim(n);
    require(x.size() == n, "evaluation point has wrong dimension");
    double r = x.norm();
    require(r > 0.0, "Green's function is singular at x = 0");
    CliffordRep rep = build_clifford_rep(n);
    require(gamma.size() == rep.N, "spinor has wrong dimension");
    GreenRadialProfile p = green_profile(n, lambda);
    CVec xg = clifford_apply(rep, x, gamma);
    GreenEval e;
    e.x = x;
    e.gamma = gamma;
    e.value = (p.g_prime(r) / r) * xg + lambda * p.g(r) * gamma;
    if (n == 3) e.singular_leading = -xg / (4.0 * kPi * r * r * r) + (lambda / (4.0 * kPi * r)) * gamma;
    else e.singular_leading = -xg / (2.0 * kPi * r * r) - (lambda / (2.0 * kPi)) * std::log(r) * gamma;
    e.remainder = e.value - e.singular_leading;
    return e;
}

CVec radial_dirac(const CliffordRep& rep, const RVec& x, double a, double a_prime, double /*b*/, double b_prime,
                  const CVec& gamma) {
    int n = rep.n;
    double r = x.norm();
    std::vector<CVec> gg(n);
    for (int i = 0; i < n; ++i) gg[i] = rep.gammas[i] * gamma;
    CVec out = CVec::Zero(rep.N);
    for (int j = 0; j < n; ++j) {
        CVec dj = (b_prime * x(j) / r) * gamma;
        for (int i = 0; i < n; ++i) dj += (a_prime * x(j) * x(i) / r + (i == j ? a : 0.0)) * gg[i];
        out += rep.gammas[j] * dj;
    }
    return out;
}

CVec green_residual(int n, double lambda, const RVec& x, const CVec& gamma) {
    GreenRadialProfile p = green_profile(n, lambda);
    CliffordRep rep = build_clifford_rep(n);
    double r = x.norm();
    double a = p.g_prime(r) / r;
    double ap = p.g_second(r) / r - p.g_prime(r) / (r * r);
    double b = lambda * p.g(r), bp = lambda * p.g_prime(r);
    CVec G = euclidean_green_eval(n, lambda, x, gamma).value;
    return radial_dirac(rep, x, a, ap, b, bp, gamma) - lambda * G;
}

BumpSpec default_bump(int n) {
    check_dim(n);
    int N = 2;
    BumpSpec b;
    b.c0 = CVec(N);
    b.c0 << cplx(0.8, 0.1), cplx(-0.3, 0.5);
    for (int i = 0; i < n; ++i) {
        CVec ci(N);
        ci << cplx(0.2 * (i + 1), -0.1), cplx(0.05, 0.3 - 0.1 * i);
        b.c.push_back(ci);
    }
    return b;
}

BumpSpec zero_bump(int n) {
    BumpSpec b = default_bump(n);
    b.c0.setZero();
    for (auto& c : b.c) c.setZero();
    return b;
}

namespace {

// (D - lambda) psi and psi for the Gaussian-windowed linear spinor.
CVec bump_dirac_minus_lambda(const CliffordRep& rep, const BumpSpec& b, double lambda, const RVec& x) {
    int n = rep.n;
    double h = std::exp(-x.squaredNorm() / (2.0 * b.sigma * b.sigma));
    CVec s = b.c0;
    for (int i = 0; i < n; ++i) s += x(i) * b.c[i];
    CVec out = (-1.0 / (b.sigma * b.sigma)) * clifford_apply(rep, x, s);
    for (int j = 0; j < n; ++j) out += rep.gammas[j] * b.c[j];
    return h * out - lambda * h * s;
}

cplx neville_at_zero(const std::vector<double>& xs, std::vector<cplx> ys) {
    int m = static_cast<int>(xs.size());
    for (int k = 1; k < m; ++k)
        for (int i = 0; i < m - k; ++i) ys[i] = (xs[i + k] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + k] - xs[i]);
    return ys[0];
}

}  // namespace

GreenVerifyResult green_verify(int n, double lambda, const BumpSpec& bump, const CVec& gamma,
                               const std::vector<double>& shells) {
    check_dim(n);
    CliffordRep rep = build_clifford_rep(n);
    require(gamma.size() == rep.N, "spinor has wrong dimension");
    require(bump.c0.size() == rep.N && static_cast<int>(bump.c.size()) == n, "bump spec has wrong dimensions");
    require(bump.sigma > 0.0 && bump.order >= 8 && !bump.eps.empty(), "invalid bump spec");
    // support check: the Gaussian window must be negligible at the quadrature boundary
    require(bump.radius * bump.radius / (2.0 * bump.sigma * bump.sigma) >= 30.0,
            "bump is not supported inside the quadrature box");
    for (double e : bump.eps) require(e > 0.0 && e < bump.radius, "invalid exclusion radius");

    GreenVerifyResult res;
    for (double r : shells) {
        require(r > 0.0, "residual shells must have positive radius");
        for (int k = 0; k < 16; ++k) {
            RVec x(n);
            double t = 2.0 * kPi * (k + 0.37) / 16.0;
            if (n == 2) x << std::cos(t), std::sin(t);
            else {
                double z = -1.0 + (2.0 * k + 1.0) / 16.0;
                double rho = std::sqrt(1.0 - z * z);
                x << rho * std::cos(2.4 * k), rho * std::sin(2.4 * k), z;
            }
            x *= r;
            res.max_residual = std::max(res.max_residual, green_residual(n, lambda, x, gamma).norm());
        }
    }

    std::vector<double> gx, gw;
    gauss_legendre(bump.order, gx, gw);
    int m = bump.order;
    for (double eps : bump.eps) {
        double lo = eps, hi = bump.radius;
        std::vector<cplx> partial(m, cplx(0.0));
        parallel_for(static_cast<std::size_t>(m), [&](std::size_t ir) {
            double r = 0.5 * (hi - lo) * gx[ir] + 0.5 * (hi + lo);
            double wr = 0.5 * (hi - lo) * gw[ir];
            cplx acc = 0.0;
            if (n == 2) {
                for (int ip = 0; ip < m; ++ip) {
                    double ph = 2.0 * kPi * ip / m;
                    RVec x(2);
                    x << r * std::cos(ph), r * std::sin(ph);
                    CVec G = euclidean_green_eval(n, lambda, x, gamma).value;
                    acc += (2.0 * kPi / m) * r * G.dot(bump_dirac_minus_lambda(rep, bump, lambda, x));
                }
            } else {
                for (int it = 0; it < m; ++it) {
                    double ct = gx[it], st = std::sqrt(1.0 - ct * ct);
                    for (int ip = 0; ip < m; ++ip) {
                        double ph = 2.0 * kPi * ip / m;
                        RVec x(3);
                        x << r * st * std::cos(ph), r * st * std::sin(ph), r * ct;
                        CVec G = euclidean_green_eval(n, lambda, x, gamma).value;
                        acc += gw[it] * (2.0 * kPi / m) * r * r * G.dot(bump_dirac_minus_lambda(rep, bump, lambda, x));
                    }
                }
            }
            partial[ir] = wr * acc;
        });
        cplx total = 0.0;
        for (const auto& p : partial) total += p;
        res.raw.push_back(total);
    }
    res.extrapolated = neville_at_zero(bump.eps, res.raw);
    res.target = gamma.dot(bump.c0);
    res.integral_error = std::abs(res.extrapolated - res.target);
    return res;
}

double radial_preimage_check(int n, double k, int variant, int samples) {
    check_dim(n);
    require(variant >= 1 && variant <= 4, "preimage variant must be 1..4");
    require(std::isfinite(k), "exponent must be finite");
    if (variant == 1) require(k != -n, "variant 1 excludes k = -n");
    if (variant == 3) require(k != -2, "variant 3 excludes k = -2");
    CliffordRep rep = build_clifford_rep(n);
    CVec gamma = default_gamma(rep.N);
    double err = 0.0;
    for (int s = 0; s < samples; ++s) {
        // deterministic scattered points with 0.1 <= |x| <= 3
        RVec dir(n);
        for (int i = 0; i < n; ++i) dir(i) = std::sin(1.3 * (s + 1) * (i + 1) + 0.7 * i) + 0.1 * (i + 1);
        dir.normalize();
        double r = 0.1 + 2.9 * std::fmod(0.618033988749895 * (s + 1), 1.0);
        RVec x = r * dir;
        double a = 0.0, ap = 0.0, b = 0.0, bp = 0.0;
        CVec rhs;
        double lr = std::log(r);
        switch (variant) {
        case 1:
            a = -std::pow(r, k) / (n + k);
            ap = -k * std::pow(r, k - 1) / (n + k);
            rhs = std::pow(r, k) * gamma;
            break;
        case 2:
            a = (1.0 - n * lr) / (n * n);
            ap = -1.0 / (n * r);
            rhs = lr * gamma;
            break;
        case 3:
            b = std::pow(r, k + 2) / (k + 2);
            bp = std::pow(r, k + 1);
            rhs = std::pow(r, k) * clifford_apply(rep, x, gamma);
            break;
        default:
            b = lr;
            bp = 1.0 / r;
            rhs = clifford_apply(rep, x, gamma) / (r * r);
            break;
        }
        CVec lhs = radial_dirac(rep, x, a, ap, b, bp, gamma);
        err = std::max(err, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
    }
    return err;
}

double fit_log_coefficient(double lambda, double r_min, double r_max, int samples) {
    require(r_min > 0.0 && r_max > r_min && samples >= 2, "invalid log-fit range");
    CVec gamma = default_gamma(2);
    RVec dir(2);
    dir << 0.6, 0.8;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        double t = std::log(r_min) + (std::log(r_max) - std::log(r_min)) * i / (samples - 1);
        double r = std::exp(t);
        GreenEval e = euclidean_green_eval(2, lambda, r * dir, gamma);
        double y = gamma.dot(e.value).real() / gamma.squaredNorm();
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
    }
    return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
}

namespace {

void check_torus_inputs(const Lattice& lat, const SpinStructureDelta& delta, const RVec& x, const CVec& gamma) {
    check_dim(lat.n);
    require(!delta_is_zero(delta), "torus Green's function requires a spin structure with some bit = 1");
    require(x.size() == lat.n, "evaluation point has wrong dimension");
    require(gamma.size() == (1 << (lat.n / 2)), "spinor has wrong dimension");
    RVec s = lat.dual_basis.transpose() * x;
    RVec frac(lat.n);
    for (int i = 0; i < lat.n; ++i) frac(i) = s(i) - std::round(s(i));
    require((lat.basis * frac).norm() > 1e-12, "evaluation point lies on the lattice");
}

}  // namespace

std::map<IntVec, CVec> spectral_green_coefficients(const Lattice& lat, const SpinStructureDelta& delta,
                                                   const CVec& gamma, double cutoff) {
    require(!delta_is_zero(delta), "spectral Green's sum requires a spin structure with some bit = 1");
    CliffordRep rep = build_clifford_rep(lat.n);
    std::map<IntVec, CVec> out;
    for (const auto& p : enumerate_dual(lat, delta, cutoff)) {
        // (2 pi i v.gamma)^{-1} = i v.gamma / (2 pi |v|^2)
        CVec c = (kI / (2.0 * kPi * p.norm * p.norm)) * clifford_apply(rep, p.shifted, gamma);
        out.emplace(p.alpha, c / lat.covolume);
    }
    return out;
}

CVec torus_green(const Lattice& lat, const SpinStructureDelta& delta, const RVec& x, const CVec& gamma,
                 TorusGreenMethod method, double param) {
    check_torus_inputs(lat, delta, x, gamma);
    require(param > 0.0, "shell radius / cutoff must be positive");
    CVec out = CVec::Zero(gamma.size());
    if (method == TorusGreenMethod::ImageSum) {
        auto pts = enumerate_lattice(lat, param);
        std::vector<CVec> terms(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
            terms[i] = static_cast<double>(character(delta, pts[i].coords)) * euclidean_green_eval(lat.n, 0.0, x + pts[i].position, gamma).value;
        });
        for (const auto& t : terms) out += t;
        return out;
    }
    double heat = method == TorusGreenMethod::HeatSpectralSum ? -std::log(1e-16) / (4.0 * kPi * kPi * param * param) : 0.0;
    for (const auto& [alpha, c] : spectral_green_coefficients(lat, delta, gamma, param)) {
        RVec v = shifted_frequency(lat, delta, alpha);
        double w = heat > 0.0 ? std::exp(-4.0 * kPi * kPi * heat * v.squaredNorm()) : 1.0;
        out += (w * std::polar(1.0, 2.0 * kPi * v.dot(x))) * c;
    }
    return out;
}

MassEndomorphism mass_endomorphism_torus(const Lattice& lat, const SpinStructureDelta& delta, double R) {
    check_dim(lat.n);
    require(!delta_is_zero(delta), "mass endomorphism requires a spin structure with some bit = 1");
    require(R > 0.0, "shell radius must be positive");
    int N = 1 << (lat.n / 2);
    auto pts = enumerate_lattice(lat, R);
    MassEndomorphism m;
    m.matrix = CMat::Zero(N, N);
    std::size_t i = 0;
    while (i < pts.size()) {
        std::size_t j = i;
        while (j < pts.size() && pts[j].norm - pts[i].norm <= 1e-12 * std::max(1.0, pts[i].norm)) ++j;
        if (pts[i].norm > 0.0) {
            for (std::size_t k = i; k < j; ++k)
                for (int c = 0; c < N; ++c)
                    m.matrix.col(c) += static_cast<double>(character(delta, pts[k].coords)) *
                                       euclidean_green_eval(lat.n, 0.0, pts[k].position, CVec::Unit(N, c)).value;
            m.points += static_cast<int>(j - i);
            m.trace.push_back({pts[i].norm, static_cast<int>(j - i), m.matrix.cwiseAbs().maxCoeff()});
        }
        i = j;
    }
    return m;
}

CMat half_shell_sum(const Lattice& lat, const SpinStructureDelta& delta, int shell) {
    check_dim(lat.n);
    require(shell >= 1, "shell index must be >= 1");
    int N = 1 << (lat.n / 2);
    double R = 1.0;
    std::vector<LatticePoint> pts;
    std::vector<double> radii;
    while (true) {
        pts = enumerate_lattice(lat, R);
        radii.clear();
        for (const auto& p : pts)
            if (p.norm > 0.0 && (radii.empty() || p.norm - radii.back() > 1e-12 * p.norm)) radii.push_back(p.norm);
        if (static_cast<int>(radii.size()) > shell) break;
        R *= 2.0;
    }
    double target = radii[shell - 1];
    CMat sum = CMat::Zero(N, N);
    for (const auto& p : pts) {
        if (std::abs(p.norm - target) > 1e-12 * target) continue;
        auto nz = std::find_if(p.coords.begin(), p.coords.end(), [](int v) { return v != 0; });
        if (nz == p.coords.end() || *nz < 0) continue;
        for (int c = 0; c < N; ++c)
            sum.col(c) += static_cast<double>(character(delta, p.coords)) * euclidean_green_eval(lat.n, 0.0, p.position, CVec::Unit(N, c)).value;
    }
    return sum;
}

}  // namespace spinlab
