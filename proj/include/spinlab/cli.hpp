#pragma once

#include <iosfwd>
#include <json.hpp>

#include "spinlab/lattice.hpp"

namespace spinlab {

inline constexpr const char* kToolName = "spinlab";
inline constexpr const char* kToolVersion = "1.0.0";

// "I2", "I3", ... or n*n row-major numbers; row i is the basis vector gamma_i.
Lattice parse_lattice_flag(const std::string& text);
// Bit string such as "110"; empty means all ones.
SpinStructureDelta parse_delta_flag(const Lattice& lat, const std::string& text);
RVec parse_real_vector(const std::string& text, int expected_size);
// Comma-separated entries "re" or "re:im".
CVec parse_complex_vector(const std::string& text, int expected_size);

nlohmann::json json_complex(cplx z);
nlohmann::json json_vector(const CVec& v);
nlohmann::json json_vector(const RVec& v);
nlohmann::json json_matrix(const CMat& m);

// Entry point shared by the executable and the tests; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinlab
