#pragma once

#include <stdexcept>
#include <string>

namespace knds {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The parameters do not describe a spacetime with distinct event and
/// cosmological horizons.
class RegimeError : public Error {
public:
    using Error::Error;
};

class NotAHorizon : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// k = 0 passed where only the equivariant modes are defined.
class ZeroModeError : public Error {
public:
    using Error::Error;
};

class DiscretizationError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

class TailModelError : public Error {
public:
    using Error::Error;
};

/// Failure inside the trace-to-parameter pipeline. `stage()` names the step
/// that rejected the input so callers can report it.
class ReconstructionError : public Error {
public:
    ReconstructionError(std::string stage, const std::string& message);

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

class DegenerateTraces : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

class NonPositiveLambda : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

class OutOfRange : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

class InconsistentTraces : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

class NegativeRadiusSquared : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

class SingularSystem : public ReconstructionError {
public:
    using ReconstructionError::ReconstructionError;
};

}  // namespace knds
