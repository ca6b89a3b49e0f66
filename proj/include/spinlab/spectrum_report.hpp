#pragma once

#include <json.hpp>

#include "spinlab/common.hpp"

namespace spinlab {

enum class Provenance { Analytic, Discretized };

struct SpectrumEntry {
    double value = 0.0;
    int multiplicity = 0;
};

struct SpectrumReport {
    std::vector<SpectrumEntry> entries;
    double cutoff = 0.0;
    double cluster_tol = 0.0;
    Provenance provenance = Provenance::Analytic;
    int n = 0;
    IntVec delta_bits;
    std::string lattice_hash;

    int total_count() const;
    // Eigenvalues repeated by multiplicity, ascending.
    std::vector<double> expanded() const;
};

// Groups an ascending list into clusters whose consecutive gaps are <= tol.
std::vector<SpectrumEntry> cluster_sorted(const std::vector<double>& sorted, double tol);

// Full-precision decimal text ("%.17g").
std::string format_double(double v);
double parse_double(const std::string& s);

nlohmann::json to_json(const SpectrumReport& r);
SpectrumReport spectrum_from_json(const nlohmann::json& j);

}  // namespace spinlab
