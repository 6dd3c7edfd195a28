#pragma once

#include <stdexcept>
#include <string>

namespace hopfloq {

struct GapClosingError : std::runtime_error {
    explicit GapClosingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BranchAmbiguityError : std::runtime_error {
    explicit BranchAmbiguityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvergenceError : std::runtime_error {
    explicit NonConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonzeroFluxError : std::runtime_error {
    explicit NonzeroFluxError(const std::string& msg) : std::runtime_error(msg) {}
};

struct OpenCurveError : std::runtime_error {
    explicit OpenCurveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegeneratePreimageError : std::runtime_error {
    explicit DegeneratePreimageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CurvesTooCloseError : std::runtime_error {
    explicit CurvesTooCloseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonContractibleCurveError : std::runtime_error {
    explicit NonContractibleCurveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoEdgeModeError : std::runtime_error {
    explicit NoEdgeModeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hopfloq
