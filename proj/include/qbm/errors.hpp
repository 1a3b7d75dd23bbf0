#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Base class for all library errors. Config/validation problems derive from
// DomainError, numerical failures from NumericalError; the CLI maps the two
// branches to distinct exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct OverdampedError : DomainError {
    using DomainError::DomainError;
};

struct InstabilityError : DomainError {
    using DomainError::DomainError;
};

struct UnphysicalInitError : DomainError {
    using DomainError::DomainError;
};

struct PoleError : DomainError {
    using DomainError::DomainError;
};

struct WindowError : DomainError {
    using DomainError::DomainError;
};

struct MemoryWindowTooShort : DomainError {
    using DomainError::DomainError;
};

struct ResolutionError : DomainError {
    using DomainError::DomainError;
};

struct QuadratureFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct SlowConvergence : NumericalError {
    using NumericalError::NumericalError;
};

struct ResonanceError : NumericalError {
    using NumericalError::NumericalError;
};

struct NonConvergence : NumericalError {
    using NumericalError::NumericalError;
};

struct RootFindingFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct StepFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct DiagonalizationFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace qbm
