#pragma once

#include "spinlab/clifford.hpp"
#include "spinlab/polynomial.hpp"

namespace spinlab {

// Row for the eigenvalues +-(n/2 + m); multiplicity is per sign.
struct SphereDiracRow {
    int m = 0;
    int twice_abs_lambda = 0;
    long long multiplicity = 0;
    double abs_lambda() const { return 0.5 * twice_abs_lambda; }
};

struct SphereLaplaceRow {
    int k = 0;
    long long eigenvalue = 0;
    long long multiplicity = 0;
};

std::vector<SphereDiracRow> sphere_dirac_spectrum(int n, int m_max);
std::vector<SphereLaplaceRow> sphere_laplace_spectrum(int n, int k_max);

struct SphereEigenspinorSpec {
    int k = 0;
    int mu = -1;
    int eps = 1;
    HarmonicPolynomial f;
    int j = 1;
    CliffordRep ambient_rep;
    std::vector<CVec> constant_spinors;  // alpha_1..alpha_N in the ambient spinor module

    int n() const { return f.ambient_dim() - 1; }
    double eigenvalue() const;
    double coefficient() const;  // multiplies f in front of phi_{mu,j}
};

// Ambient constant spinors: positive half-spinors for odd n, the full module for even n.
std::vector<CVec> ambient_constant_spinors(const CliffordRep& ambient);

SphereEigenspinorSpec make_sphere_spec(const HarmonicPolynomial& f, int eps, int mu, int j);

CVec sphere_eigenspinor_eval(const SphereEigenspinorSpec& spec, const RVec& x);

// grad f - k f x
RVec sphere_gradient(const HarmonicPolynomial& f, const RVec& x);

struct SphereZero {
    RVec x;
    double grad_norm = 0.0;
    int cluster = -1;  // -1: singular point (tangent space of the zero set undetermined)
};

struct SphereZeroScan {
    std::vector<SphereZero> zeros;
    int seeds = 0;
    int converged = 0;
    int num_clusters = 0;
    int num_singular = 0;
};

SphereZeroScan sphere_zero_scan(const HarmonicPolynomial& f, int samples, int newton_iters = 50,
                                unsigned seed = 0);

// Quasi-uniform points on S^{dim-1} (Halton + Box-Muller).
std::vector<RVec> sphere_samples(int dim, int count, unsigned seed);

}  // namespace spinlab
