#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace cfs {

using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Thresholds shared by every module. Exact conditions (equal moduli, real
/// spectrum, signature) need explicit floating-point cut-offs.
struct NumericsConfig {
    double tol_herm = 1e-12;   // relative asymmetry allowed for Hermitian input
    double tol_rank = 1e-10;   // relative magnitude below which eigenvalues count as zero
    double tol_class = 1e-8;   // relative tolerance of the causal classification
};

enum class ErrorCode {
    InvalidArgument,
    NotHermitian,
    SignatureViolation,
    DimensionMismatch,
    EmptyMeasure,
    NotUnitVector,
    UnknownFixture,
    ScheduleInvalid,
    NonConvergent,
    InvalidParams,
    BoxTooSmall,
    WindowExhausted,
    SupportNotCompact,
    UnsupportedMode,
    SymmetryViolation,
    NotASolution,
    DegenerateSeparation,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }
    // Numerical failures map to CLI exit code 3, everything else to 2.
    bool numerical() const;

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

constexpr double kPi = 3.14159265358979323846;

}  // namespace cfs
