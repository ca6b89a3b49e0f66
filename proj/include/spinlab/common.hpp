#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinlab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using IntVec = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorCode { Parse, Precond, Numeric, IO };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::Precond, msg);
}

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::Precond: return "PRECOND";
    case ErrorCode::Numeric: return "NUMERIC";
    case ErrorCode::IO: return "IO";
    }
    return "UNKNOWN";
}

}  // namespace spinlab
