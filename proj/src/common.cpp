#include "cfs/common.hpp"

namespace cfs {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::SignatureViolation: return "SignatureViolation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyMeasure: return "EmptyMeasure";
    case ErrorCode::NotUnitVector: return "NotUnitVector";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::ScheduleInvalid: return "ScheduleInvalid";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
    case ErrorCode::WindowExhausted: return "WindowExhausted";
    case ErrorCode::SupportNotCompact: return "SupportNotCompact";
    case ErrorCode::UnsupportedMode: return "UnsupportedMode";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::NotASolution: return "NotASolution";
    case ErrorCode::DegenerateSeparation: return "DegenerateSeparation";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool Error::numerical() const {
    return code_ == ErrorCode::NonConvergent || code_ == ErrorCode::SymmetryViolation ||
           code_ == ErrorCode::NotASolution;
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cfs
