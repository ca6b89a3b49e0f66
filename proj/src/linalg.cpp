#include "spinlab/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <random>

namespace spinlab {

namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

}  // namespace

RVec hermitian_eigenvalues(const CMat& A) {
    require(A.rows() == A.cols(), "hermitian_eigenvalues: matrix must be square");
    int n = static_cast<int>(A.rows());
    if (n == 0) return RVec();
    CMat a = A;
    RVec w(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, lp(a.data()), n, w.data());
    if (info != 0) fail(ErrorCode::Numeric, "zheevd failed with info " + std::to_string(info));
    return w;
}

void hermitian_eigensystem(const CMat& A, RVec& values, CMat& vectors) {
    require(A.rows() == A.cols(), "hermitian_eigensystem: matrix must be square");
    int n = static_cast<int>(A.rows());
    vectors = A;
    values.resize(n);
    if (n == 0) return;
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, lp(vectors.data()), n, values.data());
    if (info != 0) fail(ErrorCode::Numeric, "zheevd failed with info " + std::to_string(info));
}

void generalized_symmetric_lowest(const RMat& A, const RMat& B, int count, RVec& values, RMat* vectors) {
    int n = static_cast<int>(A.rows());
    require(A.cols() == n && B.rows() == n && B.cols() == n, "generalized problem: size mismatch");
    require(count >= 1 && count <= n, "generalized problem: count out of range");
    RMat a = A, b = B;
    RVec w(n);
    RMat z(n, vectors ? count : 1);
    std::vector<lapack_int> ifail(n);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, vectors ? 'V' : 'N', 'I', 'U', n, a.data(), n, b.data(), n,
                                     0.0, 0.0, 1, count, 2.0 * LAPACKE_dlamch('S'), &found, w.data(), z.data(),
                                     n, ifail.data());
    if (info > n) fail(ErrorCode::Numeric, "B is not positive definite (cutoff too small for the conformal factor?)");
    if (info != 0) fail(ErrorCode::Numeric, "dsygvx failed with info " + std::to_string(info));
    values = w.head(found);
    if (vectors) *vectors = z.leftCols(found);
}

HermitianCholesky::HermitianCholesky(const CMat& A) : factor_(A) {
    require(A.rows() == A.cols(), "cholesky: matrix must be square");
    int n = static_cast<int>(A.rows());
    lapack_int info = LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, lp(factor_.data()), n);
    if (info != 0) fail(ErrorCode::Numeric, "matrix is not positive definite (zpotrf info " + std::to_string(info) + ")");
}

void HermitianCholesky::solve_in_place(CMat& B) const {
    int n = size();
    require(B.rows() == n, "cholesky solve: size mismatch");
    lapack_int info = LAPACKE_zpotrs(LAPACK_COL_MAJOR, 'L', n, static_cast<int>(B.cols()),
                                     lp(const_cast<cplx*>(factor_.data())), n, lp(B.data()), n);
    if (info != 0) fail(ErrorCode::Numeric, "zpotrs failed");
}

LanczosResult lanczos_extreme(const std::function<CVec(const CVec&)>& apply, int dim, int max_iter, double tol) {
    require(dim >= 1, "lanczos: empty operator");
    int m_max = std::min(dim, max_iter);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    CVec q(dim);
    for (int i = 0; i < dim; ++i) q(i) = cplx(nd(rng), nd(rng));
    q.normalize();
    std::vector<CVec> Q{q};
    std::vector<double> alpha, beta;
    LanczosResult res;
    for (int k = 0; k < m_max; ++k) {
        CVec w = apply(Q[k]);
        double a = Q[k].dot(w).real();
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : Q) w -= v.dot(w) * v;
        double b = w.norm();
        int m = k + 1;
        RMat T = RMat::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<RMat> es(T);
        double lo = es.eigenvalues()(0), hi = es.eigenvalues()(m - 1);
        double scale = std::max(std::abs(lo), std::abs(hi));
        double r = std::max(std::abs(b * es.eigenvectors()(m - 1, 0)), std::abs(b * es.eigenvectors()(m - 1, m - 1)));
        res = {std::abs(lo) > std::abs(hi) ? lo : hi, lo, hi, r, m, false};
        if (r <= tol * scale || b <= 1e-14 * scale || m == dim) {
            res.converged = true;
            return res;
        }
        beta.push_back(b);
        Q.push_back(w / b);
    }
    return res;
}

}  // namespace spinlab
