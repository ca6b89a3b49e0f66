#pragma once

#include "spinlab/common.hpp"

namespace spinlab {

struct CliffordRep {
    int n = 0;
    int N = 0;
    std::vector<CMat> gammas;
    CMat omega;
};

enum class StructureKind { QuatCommutingJ, RealAnticommutingK };

// Conjugate-linear map sigma -> matrix * conj(sigma).
struct StructureMap {
    StructureKind kind;
    CMat matrix;

    CVec apply(const CVec& sigma) const { return matrix * sigma.conjugate(); }
};

CliffordRep build_clifford_rep(int n);

CVec clifford_apply(const CliffordRep& rep, const RVec& v, const CVec& sigma);
CVec clifford_apply(const CliffordRep& rep, const CVec& v, const CVec& sigma);

// Sum_i v_i gammas[i].
CMat clifford_matrix(const CliffordRep& rep, const RVec& v);

StructureMap structure_map(const CliffordRep& rep, StructureKind kind);

CMat volume_element(const CliffordRep& rep);

Eigen::Matrix3d frame_from_spinor(const CVec& sigma);

}  // namespace spinlab
