#pragma once

#include <functional>
#include <map>

#include "spinlab/torus_spectrum.hpp"

namespace spinlab {

// Gamma-periodic Fourier series: integer offset m -> coefficient of e^{2 pi i m.s}.
using FourierSeries = std::map<IntVec, cplx>;

struct ConformalFactor {
    int n = 0;
    FourierSeries modes;

    double eval_cell(const RVec& s) const;
    int max_mode() const;
};

// Checks u_{-m} = conj(u_m); throws on violation.
void validate_real(const ConformalFactor& u);

// Terms "amp*cos:m1,...,mn" / "amp*sin:m1,...,mn" joined by commas; "0" or "" is u = 0.
ConformalFactor parse_conformal_factor(const std::string& text, int n);
std::string describe(const ConformalFactor& u);

using CellFunction = std::function<double(const RVec& s)>;

// Coefficients of h for |m_i| <= max_mode by direct quadrature on a grid^n mesh.
FourierSeries fourier_coefficients(int n, const CellFunction& h, int max_mode, int grid);

struct HermitianOperator {
    Lattice lat;
    SpinStructureDelta delta;
    CliffordRep rep;
    std::vector<DualPoint> modes;
    std::map<IntVec, int> index;
    double cutoff = 0.0;
    CMat entries;

    int N() const { return rep.N; }
    int dim() const { return static_cast<int>(entries.rows()); }
};

HermitianOperator assemble_conformal_dirac(const Lattice& lat, const SpinStructureDelta& delta,
                                           const ConformalFactor& u, double cutoff);
// Same operator for an arbitrary smooth u given pointwise in cell coordinates.
HermitianOperator assemble_conformal_dirac(const Lattice& lat, const SpinStructureDelta& delta, const CellFunction& u,
                                           int u_max_mode, double cutoff);

struct EigenResult {
    SpectrumReport report;
    RVec values;
    std::vector<FourierSpinorField> vectors;
    double max_residual = 0.0;
    double norm = 0.0;  // max |lambda|
};

inline constexpr double kDefaultClusterRelTol = 1e-8;

EigenResult hermitian_spectrum(const HermitianOperator& op, bool want_vectors,
                               double cluster_rel_tol = kDefaultClusterRelTol);

// Conjugate-linear mode-space structure: v -> M conj(v).
CMat structure_mode_matrix(const HermitianOperator& op, StructureKind kind);
// ||M conj(A) + A M|| / ||A|| for K, ||M conj(A) - A M|| / ||A|| for J (max norms).
double structure_defect(const HermitianOperator& op, StructureKind kind);

struct QTensorField {
    int n = 0;
    double covolume = 0.0;
    // (i, j) with i <= j
    std::map<std::pair<int, int>, FourierSeries> components;

    const FourierSeries& component(int i, int j) const;
    cplx eval_cell(int i, int j, const RVec& s) const;
};

QTensorField energy_momentum(const FourierSpinorField& psi);
// Hermitian polarization: Q_ab(X,Y) = 1/4 [<X.d_Y psi_b + Y.d_X psi_b, psi_a> + <psi_b, X.d_Y psi_a + Y.d_X psi_a>].
QTensorField energy_momentum_cross(const FourierSpinorField& psi_a, const FourierSpinorField& psi_b);

struct MetricPerturbation {
    enum class Kind { Conformal, ConstantSymmetric } kind = Kind::Conformal;
    FourierSeries f;  // conformal: k = f g
    RMat K;           // constant symmetric k

    static MetricPerturbation conformal(const FourierSeries& f);
    static MetricPerturbation constant(const RMat& K);
};

// -1/2 int (k, Q)
cplx integrate_against(const QTensorField& Q, const MetricPerturbation& k);

// V_ab = -1/2 int (k, Q_ab) for an orthonormal eigen-cluster.
CMat derivative_matrix(const std::vector<FourierSpinorField>& cluster, double lambda, const MetricPerturbation& k);
// Sorted eigenvalues of derivative_matrix.
RVec eigenvalue_derivative(const std::vector<FourierSpinorField>& cluster, double lambda, const MetricPerturbation& k);
// -(lambda/2) int f <psi_b, psi_a>, the conformal shortcut.
CMat conformal_derivative_matrix(const std::vector<FourierSpinorField>& cluster, double lambda, const FourierSeries& f);

struct ConformalLaplacianResult {
    RVec values;
    RVec ground_vector;  // real basis coefficients
    double ground_rayleigh = 0.0;
    int dim = 0;
};

ConformalLaplacianResult conformal_laplacian_solve(const Lattice& lat, const ConformalFactor& u, double cutoff,
                                                   int count);
RVec conformal_laplacian_spectrum(const Lattice& lat, const ConformalFactor& u, double cutoff, int count);

enum class HijaziSolver { Dense, Iterative };

struct HijaziResult {
    double lambda1 = 0.0;
    double lambda1_sq = 0.0;
    double mu0 = 0.0;
    double bound = 0.0;  // (3/8) mu0
    double margin = 0.0;
    int dirac_dim = 0;
    int laplace_dim = 0;
    int lanczos_iterations = 0;
};

// Smallest |eigenvalue| of the conformal Dirac operator.
double smallest_dirac_eigenvalue(const Lattice& lat, const SpinStructureDelta& delta, const ConformalFactor& u,
                                 double cutoff, HijaziSolver solver, int* iterations = nullptr);

HijaziResult hijazi_check(const Lattice& lat, const SpinStructureDelta& delta, const ConformalFactor& u, double cutoff,
                          HijaziSolver solver = HijaziSolver::Iterative);

}  // namespace spinlab
