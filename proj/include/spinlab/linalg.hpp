#pragma once

#include <functional>

#include "spinlab/common.hpp"

namespace spinlab {

// Dense Hermitian eigensolve (LAPACK zheevd). Eigenvalues ascending.
RVec hermitian_eigenvalues(const CMat& A);
void hermitian_eigensystem(const CMat& A, RVec& values, CMat& vectors);

// Lowest `count` eigenpairs of A x = mu B x, A symmetric, B symmetric positive definite (dsygvx).
// Throws ErrorCode::Numeric when B is not positive definite.
void generalized_symmetric_lowest(const RMat& A, const RMat& B, int count, RVec& values, RMat* vectors);

// Cholesky factor of a Hermitian positive definite matrix, kept in LAPACK form.
class HermitianCholesky {
public:
    explicit HermitianCholesky(const CMat& A);
    // Solves A X = B in place (B has A.rows() rows).
    void solve_in_place(CMat& B) const;
    int size() const { return static_cast<int>(factor_.rows()); }

private:
    CMat factor_;
};

struct LanczosResult {
    double value = 0.0;  // Ritz value of largest magnitude
    double lowest = 0.0;
    double highest = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Extreme eigenvalues of a Hermitian operator given by its action (Lanczos with
// full reorthogonalization, deterministic start vector). Stops once both ends converge.
LanczosResult lanczos_extreme(const std::function<CVec(const CVec&)>& apply, int dim, int max_iter = 300,
                              double tol = 1e-12);

}  // namespace spinlab
