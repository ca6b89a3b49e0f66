#pragma once

#include <map>

#include "spinlab/clifford.hpp"
#include "spinlab/lattice.hpp"

namespace spinlab {

// Radial profile g with G(x,0) gamma = (g'(r)/r) x.gamma + lambda g(r) gamma.
struct GreenRadialProfile {
    int n = 0;
    double lambda = 0.0;
    double omega_nm1 = 0.0;  // area of S^{n-1}

    double g(double r) const;
    double g_prime(double r) const;
    double g_second(double r) const;
    // g'' + (n-1) g'/r + lambda^2 g
    double ode_residual(double r) const;
};

GreenRadialProfile green_profile(int n, double lambda);

struct GreenEval {
    RVec x;
    CVec gamma;
    CVec value;
    CVec singular_leading;
    CVec remainder;
};

GreenEval euclidean_green_eval(int n, double lambda, const RVec& x, const CVec& gamma);

// D applied to a(r) x.gamma + b(r) gamma by componentwise chain rule.
CVec radial_dirac(const CliffordRep& rep, const RVec& x, double a, double a_prime, double b, double b_prime,
                  const CVec& gamma);

// (D - lambda) G(x,0) gamma.
CVec green_residual(int n, double lambda, const RVec& x, const CVec& gamma);

struct BumpSpec {
    double sigma = 0.35;
    double radius = 3.0;  // quadrature ball
    CVec c0;              // psi = exp(-|x|^2 / 2 sigma^2) (c0 + sum_i x_i c_i)
    std::vector<CVec> c;
    int order = 64;
    std::vector<double> eps{0.02, 0.01, 0.005};
};

BumpSpec default_bump(int n);
BumpSpec zero_bump(int n);

struct GreenVerifyResult {
    double max_residual = 0.0;
    double integral_error = 0.0;
    cplx extrapolated = 0.0;
    cplx target = 0.0;
    std::vector<cplx> raw;  // integral for each eps
};

GreenVerifyResult green_verify(int n, double lambda, const BumpSpec& bump, const CVec& gamma,
                               const std::vector<double>& shells = {0.5, 1.0, 2.0});

// variant 1: D(-|x|^k x.g/(n+k)) = |x|^k g;  2: D((1 - n log|x|)/n^2 x.g) = log|x| g;
// 3: D(|x|^{k+2} g/(k+2)) = |x|^k x.g;         4: D(log|x| g) = |x|^{-2} x.g.
double radial_preimage_check(int n, double k, int variant, int samples = 100);

// Least-squares slope of Re<G(x,0)gamma, gamma>/|gamma|^2 against log|x| on [r_min, r_max] (n = 2).
double fit_log_coefficient(double lambda, double r_min = 1e-4, double r_max = 1e-2, int samples = 60);

enum class TorusGreenMethod { ImageSum, SpectralSum, HeatSpectralSum };

// param: shell radius R for ImageSum, cutoff Lambda for the spectral sums.
CVec torus_green(const Lattice& lat, const SpinStructureDelta& delta, const RVec& x, const CVec& gamma,
                 TorusGreenMethod method, double param);

// Mode coefficients of the truncated spectral sum (alpha -> symbol^{-1} gamma / covolume).
std::map<IntVec, CVec> spectral_green_coefficients(const Lattice& lat, const SpinStructureDelta& delta,
                                                   const CVec& gamma, double cutoff);

struct ShellPartialSum {
    double radius = 0.0;
    int points = 0;
    double partial_norm = 0.0;
};

struct MassEndomorphism {
    CMat matrix;
    std::vector<ShellPartialSum> trace;
    int points = 0;
};

MassEndomorphism mass_endomorphism_torus(const Lattice& lat, const SpinStructureDelta& delta, double R);

// Negative control: one half (first nonzero coordinate > 0) of the shell-th nonzero shell.
CMat half_shell_sum(const Lattice& lat, const SpinStructureDelta& delta, int shell);

}  // namespace spinlab
