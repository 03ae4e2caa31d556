#pragma once

#include <stdexcept>
#include <string>

namespace gf {

enum class ErrorCode {
    InvalidArgument,
    ParameterDegeneracy,
    NonConvergence,
    NumericalBlowup,
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline Error invalid_argument(const std::string& what) {
    return Error(ErrorCode::InvalidArgument, what);
}

inline Error parameter_degeneracy(const std::string& what) {
    return Error(ErrorCode::ParameterDegeneracy, what);
}

}  // namespace gf
