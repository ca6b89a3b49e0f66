#pragma once

#include <map>

#include "spinlab/clifford.hpp"
#include "spinlab/lattice.hpp"
#include "spinlab/spectrum_report.hpp"

namespace spinlab {

struct FourierSpinorField {
    Lattice lat;
    SpinStructureDelta delta;
    CliffordRep rep;
    std::map<IntVec, CVec> coeffs;

    // Value at the point x = basis * s (s in cell coordinates).
    CVec eval_cell(const RVec& s) const;
    CVec eval(const RVec& x) const;
    double l2_norm_sq() const;
};

FourierSpinorField empty_field(const Lattice& lat, const SpinStructureDelta& delta);

SpectrumReport torus_dirac_spectrum(const Lattice& lat, const SpinStructureDelta& delta, double cutoff);

SpectrumReport flat_metric_spectrum(const Lattice& lat, const SpinStructureDelta& delta, const RMat& G,
                                    double cutoff);

// Flat symbol 2 pi i v.gamma.
CMat dirac_symbol(const CliffordRep& rep, const RVec& v);

// Orthonormal basis of the mu-eigenspace of i v^.gamma (columns).
CMat eigenspace_basis(const CliffordRep& rep, const RVec& v, int mu);

FourierSpinorField torus_eigenspinor(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha,
                                     int mu, int j);

// The two-frequency eigenspinor with a codimension-2 zero set, built from
// dual points alpha, alpha2 with equal shifted norm.
FourierSpinorField two_frequency_field(const Lattice& lat, const SpinStructureDelta& delta, const IntVec& alpha,
                                       const IntVec& alpha2);

struct ZeroSample {
    RVec s;  // cell coordinates
    double abs = 0.0;
    int cluster = 0;
};

struct ZeroSetScan {
    int grid = 0;
    double max_abs = 0.0;
    double threshold = 0.0;
    std::vector<ZeroSample> points;
    int num_clusters = 0;
};

inline constexpr double kZeroRelThreshold = 1e-9;

ZeroSetScan zero_set_scan(const FourierSpinorField& field, int grid_per_axis);

struct FrameFieldReport {
    int grid = 0;
    std::vector<Eigen::Matrix3d> frames;  // index ((i*g)+j)*g+k
    double min_abs = 0.0;
    double max_abs = 0.0;
    double max_orthonormality_error = 0.0;
    double max_det_error = 0.0;
    double max_seam_jump = 0.0;
    double max_neighbor_angle = 0.0;
};

FrameFieldReport torus_frame_field(const FourierSpinorField& field, int grid);

// Relative rotation angle between two rotation matrices.
double rotation_angle(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace spinlab
