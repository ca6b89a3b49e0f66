#pragma once

#include "spinlab/common.hpp"

namespace spinlab {

struct Lattice {
    int n = 0;
    RMat basis;       // columns gamma_1..gamma_n
    RMat dual_basis;  // columns gamma*_1..gamma*_n
    double covolume = 0.0;
};

struct SpinStructureDelta {
    IntVec bits;
    RVec offset_form;  // (1/2) sum_j bits_j gamma*_j
};

struct DualPoint {
    IntVec alpha;
    RVec shifted;  // sum_j (alpha_j + bits_j/2) gamma*_j
    double norm = 0.0;
};

struct LatticePoint {
    IntVec coords;
    RVec position;
    double norm = 0.0;
};

Lattice make_lattice(const RMat& basis);
Lattice cubic_lattice(int n);

SpinStructureDelta make_delta(const Lattice& lat, const IntVec& bits);
bool delta_is_zero(const SpinStructureDelta& delta);

// alpha + bits/2 mapped through the dual basis.
RVec shifted_frequency(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha);

std::vector<DualPoint> enumerate_dual(const Lattice& lat, const SpinStructureDelta& delta, double R);

// Points of the lattice itself with |gamma'| <= R, same ordering rules.
std::vector<LatticePoint> enumerate_lattice(const Lattice& lat, double R);

// (-1)^{bits . coords}
int character(const SpinStructureDelta& delta, const IntVec& coords);

std::string lattice_hash(const Lattice& lat);

}  // namespace spinlab
