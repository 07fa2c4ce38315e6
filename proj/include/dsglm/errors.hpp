#pragma once

#include <stdexcept>
#include <string>

namespace dsglm {

// Stable machine-readable failure codes. The CLI prints them as
// `code=<NAME>` on stderr and maps each class to a fixed exit status.
enum class ErrorCode {
    InvalidArgument,
    DomainError,
    DegenerateLabels,
    DegenerateSplit,
    NonFinite,
    QuadratureFailure,
    UnsupportedDimension,
    SingularMoment,
    MissingColumn,
    NonBinaryLabel,
    NonNumericFeature,
    EmptyFile,
    IoError,
};

// usage -> exit 2, data -> exit 3, numeric -> exit 4
enum class ErrorClass { Usage, Data, Numeric };

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::DegenerateLabels: return "DegenerateLabels";
        case ErrorCode::DegenerateSplit: return "DegenerateSplit";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
        case ErrorCode::SingularMoment: return "SingularMoment";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonBinaryLabel: return "NonBinaryLabel";
        case ErrorCode::NonNumericFeature: return "NonNumericFeature";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

inline ErrorClass error_class(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::DomainError:
            return ErrorClass::Usage;
        case ErrorCode::DegenerateLabels:
        case ErrorCode::DegenerateSplit:
        case ErrorCode::UnsupportedDimension:
        case ErrorCode::MissingColumn:
        case ErrorCode::NonBinaryLabel:
        case ErrorCode::NonNumericFeature:
        case ErrorCode::EmptyFile:
        case ErrorCode::IoError:
            return ErrorClass::Data;
        case ErrorCode::NonFinite:
        case ErrorCode::QuadratureFailure:
        case ErrorCode::SingularMoment:
            return ErrorClass::Numeric;
    }
    return ErrorClass::Numeric;
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }
    const char* code_name() const { return error_code_name(code_); }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace dsglm
